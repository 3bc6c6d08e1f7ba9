#pragma once

#include "blindcd/boosting.hpp"
#include "blindcd/detect.hpp"
#include "blindcd/excitation.hpp"
#include "blindcd/filters.hpp"
#include "blindcd/graph.hpp"

#include <Eigen/Dense>
#include <array>

namespace blindcd {

/// Numerical evaluation of the suboptimality bound for one detection run.
/// conditions_met flags, in order: low-pass (eta < 1), head-alignment rank,
/// sketch rank >= k, positive perturbed gap (delta > 0).
struct TheoryReport {
    double eta = 0.0;
    double gamma_exact = 0.0;
    double gamma_bound = 0.0;
    double delta = 0.0;
    double rhs_bound = 0.0;
    double lhs_value = 0.0;
    double epsilon_used = 0.0;
    double f_detected = 0.0;
    double f_star = 0.0;
    double cov_error_norm = 0.0;
    std::array<bool, 4> conditions_met{false, false, false, false};

    bool all_conditions_met() const {
        return conditions_met[0] && conditions_met[1] && conditions_met[2] && conditions_met[3];
    }
};

// Exact subspace-alignment coefficient:
//   || diag(h_tail) V_tail^T B Q_K (diag(h_head) V_head^T B Q_K)^-1 ||_2
// with Q_K the top-k right singular vectors of the filtered sketch. Throws
// when the head matrix is singular (rank condition violated).
double gamma_exact(const LaplacianEig& eig, const FrequencyResponse& h, const Eigen::MatrixXd& b,
                   int k);

// Product bound eta * ||V_tail^T B Q_K||_2 * ||(V_head^T B Q_K)^-1||_2.
double gamma_bound(double eta, double v_tail_bq_norm, double v_head_bq_inv_norm);

struct Prop2Check {
    double lhs = 0.0; // squared projector distance between the covariance
                      // top-k eigenspace and the Laplacian head eigenspace
    double rhs = 0.0; // gamma^2 / (1 + gamma^2)
    double gap = 0.0;
};

// The projector-distance identity linking the two subspaces; an equality
// under the rank conditions, so gap is pure numerical error.
Prop2Check prop2_identity_check(const LaplacianEig& eig, const FrequencyResponse& h,
                                const Eigen::MatrixXd& b, int k);

// Evaluates the suboptimality bound of the covariance pipeline: delta from
// the noiseless covariance spectrum and the sampling perturbation, the k-means
// objective of the detected partition against the true Laplacian basis, and
// both sides of the bound. Condition failures are flagged, never thrown.
TheoryReport theorem1_report(const Graph& g, const FilterSpec& f, const SketchMatrix& b,
                             const Eigen::MatrixXd& c_hat, const DetectionResult& detection,
                             double epsilon, int f_star_restarts = 200);
TheoryReport theorem1_report(const Graph& g, const FilterSpec& f, const SketchMatrix& b,
                             const SignalBatch& batch, const DetectionResult& detection,
                             double epsilon, int f_star_restarts = 200);

// Boosted analogue: the filter is shifted by its response at the largest
// eigenvalue, the perturbation is s_star minus the shifted filtered sketch,
// and the gap is measured on that sketch's singular values.
TheoryReport corollary1_report(const Graph& g, const FilterSpec& f, const SketchMatrix& b,
                               const DecompositionSolution& sol, const DetectionResult& detection,
                               double epsilon, int f_star_restarts = 200);

// Fraction of misclassified nodes minimized over label permutations.
// Guarded to k <= 8 communities (factorial search).
double error_rate(const Partition& detected, const Partition& truth);

} // namespace blindcd
