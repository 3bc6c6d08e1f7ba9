#pragma once

#include "blindcd/detect.hpp"
#include "blindcd/excitation.hpp"

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace blindcd {

/// Least-squares estimate of the filtered sketch from (z, y) pairs.
struct LseSketch {
    Eigen::MatrixXd h_star; // N x R
    double residual_norm = 0.0;
    int l_used = 0;
};

// Solves min_H (1/L) sum_l ||y_l - H z_l||^2 through the normal equations
// with a stable factorization. Requires L >= R and z columns spanning R-space.
LseSketch lse_sketch(const SignalBatch& batch);

enum class Regularizer { element_l1, row_l2, frobenius };

/// Convex split of an estimated sketch into a trace-norm-penalized part and a
/// structured part: (1/2)||H - S - B||_F^2 + kappa ||S||_* + rho g(B),
/// optionally constrained by g*(S) <= alpha.
struct DecompositionProblem {
    double kappa = 0.1;
    double rho = 0.1;
    double alpha = std::numeric_limits<double>::infinity();
    Regularizer reg = Regularizer::element_l1;
    double step = 0.5; // in (0, 1/2]; 1/2 is the inverse smooth Lipschitz constant
    int max_iter = 5000;
    double tol = 1e-7; // relative objective-change stopping threshold
};

struct DecompositionSolution {
    Eigen::MatrixXd s_star;
    Eigen::MatrixXd b_star;
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
};

// Proximal gradient on the joint variable (S, B): one gradient step on the
// coupling term, singular-value soft-thresholding for S, the regularizer's
// proximal map for B. Descent is monotone for step <= 1/2.
DecompositionSolution decompose(const Eigen::MatrixXd& h_star, const DecompositionProblem& prob);

// Objective value of the decomposition problem at (s, b).
double decomposition_objective(const Eigen::MatrixXd& h_star, const Eigen::MatrixXd& s,
                               const Eigen::MatrixXd& b, const DecompositionProblem& prob);

// Proximal fixed-point residual at (s, b); near zero at a stationary point.
double decomposition_stationarity(const Eigen::MatrixXd& h_star, const Eigen::MatrixXd& s,
                                  const Eigen::MatrixXd& b, const DecompositionProblem& prob);

// LSE, decomposition, then k-means on the rows of the top-k left singular
// vectors of the low-rank part.
DetectionResult boosted_blind_cd(const SignalBatch& batch, int k, const DecompositionProblem& prob,
                                 const KMeansParams& kmeans_params);

// Full boosted pipeline with the intermediate solution exposed.
struct BoostedRun {
    LseSketch lse;
    DecompositionSolution solution;
    DetectionResult detection;
};
BoostedRun boosted_blind_cd_full(const SignalBatch& batch, int k, const DecompositionProblem& prob,
                                 const KMeansParams& kmeans_params);

// Indices of the r largest row sums of |b_star|; ties break toward the lowest
// index. Returned ascending.
std::vector<int> detect_excitation_sites(const DecompositionSolution& sol, int r);

} // namespace blindcd
