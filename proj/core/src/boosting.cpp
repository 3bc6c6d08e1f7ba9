#include "blindcd/boosting.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blindcd {

LseSketch lse_sketch(const SignalBatch& batch) {
    const int l = static_cast<int>(batch.z.cols());
    const int r = static_cast<int>(batch.z.rows());
    if (l < r) {
        throw std::invalid_argument("lse_sketch: need at least R samples (got L=" + std::to_string(l) +
                                    ", R=" + std::to_string(r) + ")");
    }
    const Eigen::MatrixXd gram = (batch.z * batch.z.transpose()) / l;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("lse_sketch: Gram eigensolver failed");
    }
    if (es.eigenvalues()(0) <= 1e-10) {
        throw std::invalid_argument("lse_sketch: latent samples are rank deficient; smallest Gram "
                                    "eigenvalue " + std::to_string(es.eigenvalues()(0)));
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram * l);
    LseSketch out;
    out.h_star = ldlt.solve(batch.z * batch.y.transpose()).transpose();
    out.residual_norm = (batch.y - out.h_star * batch.z).norm();
    out.l_used = l;
    return out;
}

namespace {

Eigen::MatrixXd prox_trace_norm(const Eigen::MatrixXd& m, double t, double* nuclear_after) {
    SvdThin svd = svd_thin(m);
    double nuc = 0.0;
    for (Eigen::Index i = 0; i < svd.s.size(); ++i) {
        svd.s(i) = std::max(0.0, svd.s(i) - t);
        nuc += svd.s(i);
    }
    if (nuclear_after) *nuclear_after = nuc;
    return svd.u * svd.s.asDiagonal() * svd.v.transpose();
}

Eigen::MatrixXd prox_regularizer(const Eigen::MatrixXd& m, double t, Regularizer reg) {
    switch (reg) {
        case Regularizer::element_l1:
            return m.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
        case Regularizer::row_l2: {
            Eigen::MatrixXd out = m;
            for (Eigen::Index i = 0; i < out.rows(); ++i) {
                const double norm = out.row(i).norm();
                out.row(i) *= (norm > t) ? (1.0 - t / norm) : 0.0;
            }
            return out;
        }
        case Regularizer::frobenius: {
            const double norm = m.norm();
            return (norm > t) ? Eigen::MatrixXd((1.0 - t / norm) * m)
                              : Eigen::MatrixXd(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
        }
    }
    throw std::logic_error("prox_regularizer: unknown regularizer");
}

double regularizer_value(const Eigen::MatrixXd& m, Regularizer reg) {
    switch (reg) {
        case Regularizer::element_l1: return m.cwiseAbs().sum();
        case Regularizer::row_l2: return m.rowwise().norm().sum();
        case Regularizer::frobenius: return m.norm();
    }
    throw std::logic_error("regularizer_value: unknown regularizer");
}

double nuclear_norm(const Eigen::MatrixXd& m) { return singular_values(m).sum(); }

void check_problem(const DecompositionProblem& prob) {
    if (!(prob.kappa > 0.0) || !(prob.rho > 0.0)) {
        throw std::invalid_argument("decompose: kappa and rho must be positive");
    }
    if (!(prob.step > 0.0 && prob.step <= 0.5)) {
        throw std::invalid_argument("decompose: step must lie in (0, 1/2]");
    }
    if (std::isfinite(prob.alpha) && prob.reg != Regularizer::element_l1) {
        throw std::invalid_argument("decompose: the dual-norm ceiling is only supported with the "
                                    "element-wise l1 regularizer");
    }
}

} // namespace

double decomposition_objective(const Eigen::MatrixXd& h_star, const Eigen::MatrixXd& s,
                               const Eigen::MatrixXd& b, const DecompositionProblem& prob) {
    return 0.5 * (h_star - s - b).squaredNorm() + prob.kappa * nuclear_norm(s) +
           prob.rho * regularizer_value(b, prob.reg);
}

DecompositionSolution decompose(const Eigen::MatrixXd& h_star, const DecompositionProblem& prob) {
    if (!h_star.allFinite()) {
        throw std::invalid_argument("decompose: input has non-finite entries");
    }
    check_problem(prob);
    const double tau = prob.step;
    const bool clip = std::isfinite(prob.alpha);

    DecompositionSolution sol;
    sol.s_star = Eigen::MatrixXd::Zero(h_star.rows(), h_star.cols());
    sol.b_star = Eigen::MatrixXd::Zero(h_star.rows(), h_star.cols());
    double objective = 0.5 * h_star.squaredNorm();
    sol.objective_trace.push_back(objective);

    for (int t = 0; t < prob.max_iter; ++t) {
        const Eigen::MatrixXd grad = sol.s_star + sol.b_star - h_star;
        double nuclear_s = 0.0;
        sol.s_star = prox_trace_norm(sol.s_star - tau * grad, tau * prob.kappa, &nuclear_s);
        if (clip) {
            sol.s_star = sol.s_star.cwiseMax(-prob.alpha).cwiseMin(prob.alpha);
            nuclear_s = nuclear_norm(sol.s_star);
        }
        sol.b_star = prox_regularizer(sol.b_star - tau * grad, tau * prob.rho, prob.reg);

        const double prev = objective;
        objective = 0.5 * (h_star - sol.s_star - sol.b_star).squaredNorm() + prob.kappa * nuclear_s +
                    prob.rho * regularizer_value(sol.b_star, prob.reg);
        if (!std::isfinite(objective)) {
            throw std::runtime_error("decompose: objective diverged");
        }
        sol.objective_trace.push_back(objective);
        sol.iterations = t + 1;
        if (std::abs(prev - objective) <= prob.tol * std::max(1.0, std::abs(prev))) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

double decomposition_stationarity(const Eigen::MatrixXd& h_star, const Eigen::MatrixXd& s,
                                  const Eigen::MatrixXd& b, const DecompositionProblem& prob) {
    check_problem(prob);
    const double tau = prob.step;
    const Eigen::MatrixXd grad = s + b - h_star;
    Eigen::MatrixXd s_next = prox_trace_norm(s - tau * grad, tau * prob.kappa, nullptr);
    if (std::isfinite(prob.alpha)) {
        s_next = s_next.cwiseMax(-prob.alpha).cwiseMin(prob.alpha);
    }
    const Eigen::MatrixXd b_next = prox_regularizer(b - tau * grad, tau * prob.rho, prob.reg);
    const double res2 = (s - s_next).squaredNorm() + (b - b_next).squaredNorm();
    return std::sqrt(res2) / tau;
}

BoostedRun boosted_blind_cd_full(const SignalBatch& batch, int k, const DecompositionProblem& prob,
                                 const KMeansParams& kmeans_params) {
    BoostedRun run;
    run.lse = lse_sketch(batch);
    const int rank_max = static_cast<int>(std::min(run.lse.h_star.rows(), run.lse.h_star.cols()));
    if (k < 1 || k > rank_max) {
        throw std::invalid_argument("boosted_blind_cd: k exceeds the sketch rank bound");
    }
    run.solution = decompose(run.lse.h_star, prob);
    const SvdThin svd = svd_thin(run.solution.s_star);
    run.detection.method = Method::boosted;
    run.detection.basis_used.vectors = svd.u.leftCols(k);
    run.detection.basis_used.values = svd.s.head(k);
    run.detection.kmeans = kmeans_rows(run.detection.basis_used.vectors, k, kmeans_params);
    run.detection.partition = run.detection.kmeans.partition;
    return run;
}

DetectionResult boosted_blind_cd(const SignalBatch& batch, int k, const DecompositionProblem& prob,
                                 const KMeansParams& kmeans_params) {
    return boosted_blind_cd_full(batch, k, prob, kmeans_params).detection;
}

std::vector<int> detect_excitation_sites(const DecompositionSolution& sol, int r) {
    const int n = static_cast<int>(sol.b_star.rows());
    if (r < 0 || r > n) {
        throw std::invalid_argument("detect_excitation_sites: r out of range");
    }
    const Eigen::VectorXd row_sums = sol.b_star.cwiseAbs().rowwise().sum();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&row_sums](int a, int b) {
        if (row_sums(a) != row_sums(b)) return row_sums(a) > row_sums(b);
        return a < b;
    });
    std::vector<int> out(idx.begin(), idx.begin() + r);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace blindcd
