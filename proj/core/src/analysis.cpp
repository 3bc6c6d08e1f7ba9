#include "blindcd/analysis.hpp"

#include "blindcd/numerics.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blindcd {

namespace {

constexpr double kRankTol = 1e-10;

Eigen::MatrixXd filtered_sketch(const LaplacianEig& eig, const FrequencyResponse& h,
                                const Eigen::MatrixXd& b) {
    return eig.eigenvectors * (h.values.asDiagonal() * (eig.eigenvectors.transpose() * b));
}

struct GammaParts {
    double gamma = 0.0;
    double v_tail_bq_norm = 0.0;
    double v_head_bq_inv_norm = 0.0;
    bool head_rank_ok = false;   // rank of diag(h_head) V_head^T B Q_K
    bool sketch_rank_ok = false; // sigma_k of the filtered sketch
    Eigen::VectorXd sketch_singvals;
};

GammaParts gamma_parts(const LaplacianEig& eig, const FrequencyResponse& h, const Eigen::MatrixXd& b,
                       int k) {
    const int n = static_cast<int>(eig.eigenvalues.size());
    if (k < 1 || k >= n) {
        throw std::invalid_argument("gamma: k must satisfy 1 <= k < n");
    }
    if (b.rows() != n) {
        throw std::invalid_argument("gamma: sketch row count does not match the graph");
    }
    GammaParts out;
    const Eigen::MatrixXd hb = filtered_sketch(eig, h, b);
    const SvdThin svd = svd_thin(hb);
    out.sketch_singvals = svd.s;
    const int rank_max = static_cast<int>(svd.s.size());
    if (k > rank_max) {
        return out; // sketch cannot carry k directions
    }
    out.sketch_rank_ok = svd.s(k - 1) > kRankTol * std::max(svd.s(0), 1e-300);

    const Eigen::MatrixXd b_tilde = b * svd.v.leftCols(k);
    const Eigen::MatrixXd head =
        h.values.head(k).asDiagonal() * (eig.eigenvectors.leftCols(k).transpose() * b_tilde);
    const Eigen::MatrixXd tail = h.values.tail(n - k).asDiagonal() *
                                 (eig.eigenvectors.rightCols(n - k).transpose() * b_tilde);

    Eigen::JacobiSVD<Eigen::MatrixXd> head_svd(head, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = head_svd.singularValues()(0);
    const double smin = head_svd.singularValues()(k - 1);
    out.head_rank_ok = smin > kRankTol * std::max(smax, 1e-300);
    if (!out.head_rank_ok) {
        return out;
    }
    // tail * head^-1 via a solve on the transposed system
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(head.transpose());
    out.gamma = spectral_norm(lu.solve(tail.transpose()).transpose());

    const Eigen::MatrixXd raw_head = eig.eigenvectors.leftCols(k).transpose() * b_tilde;
    const Eigen::MatrixXd raw_tail = eig.eigenvectors.rightCols(n - k).transpose() * b_tilde;
    out.v_tail_bq_norm = spectral_norm(raw_tail);
    Eigen::JacobiSVD<Eigen::MatrixXd> raw_svd(raw_head);
    const double raw_smin = raw_svd.singularValues()(k - 1);
    out.v_head_bq_inv_norm =
        raw_smin > 0.0 ? 1.0 / raw_smin : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace

double gamma_exact(const LaplacianEig& eig, const FrequencyResponse& h, const Eigen::MatrixXd& b,
                   int k) {
    const GammaParts parts = gamma_parts(eig, h, b, k);
    if (!parts.head_rank_ok || !parts.sketch_rank_ok) {
        throw std::runtime_error("gamma_exact: rank conditions violated (head alignment matrix "
                                 "singular or sketch rank below k)");
    }
    return parts.gamma;
}

double gamma_bound(double eta, double v_tail_bq_norm, double v_head_bq_inv_norm) {
    if (eta < 0.0 || v_tail_bq_norm < 0.0 || v_head_bq_inv_norm < 0.0) {
        throw std::invalid_argument("gamma_bound: inputs must be nonnegative");
    }
    return eta * v_tail_bq_norm * v_head_bq_inv_norm;
}

Prop2Check prop2_identity_check(const LaplacianEig& eig, const FrequencyResponse& h,
                                const Eigen::MatrixXd& b, int k) {
    const double gamma = gamma_exact(eig, h, b, k);
    const Eigen::MatrixXd hb = filtered_sketch(eig, h, b);
    // Top-k eigenvectors of the noiseless covariance are the top-k left
    // singular vectors of the filtered sketch.
    const SvdThin svd = svd_thin(hb);
    const double dist = projector_distance(svd.u.leftCols(k), eig.eigenvectors.leftCols(k));
    Prop2Check out;
    out.lhs = dist * dist;
    out.rhs = gamma * gamma / (1.0 + gamma * gamma);
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

namespace {

TheoryReport bound_report(const LaplacianEig& eig, const FrequencyResponse& h,
                          const Eigen::MatrixXd& b, const Eigen::VectorXd& level_values,
                          double perturbation_norm, const Partition& detected, double epsilon,
                          int f_star_restarts) {
    const int k = detected.k;
    TheoryReport rep;
    rep.epsilon_used = epsilon;
    rep.cov_error_norm = perturbation_norm;

    try {
        rep.eta = lowpass_coefficient(h, k);
        rep.conditions_met[0] = rep.eta < 1.0;
    } catch (const std::domain_error&) {
        rep.eta = std::numeric_limits<double>::infinity();
        rep.conditions_met[0] = false;
    }

    const GammaParts parts = gamma_parts(eig, h, b, k);
    rep.conditions_met[1] = parts.head_rank_ok;
    rep.conditions_met[2] = parts.sketch_rank_ok;
    rep.gamma_exact = parts.head_rank_ok ? parts.gamma : std::numeric_limits<double>::quiet_NaN();
    rep.gamma_bound = gamma_bound(std::min(rep.eta, std::numeric_limits<double>::max()),
                                  parts.v_tail_bq_norm, parts.v_head_bq_inv_norm);

    const int levels = static_cast<int>(level_values.size());
    const double level_k = (k - 1 < levels) ? level_values(k - 1) : 0.0;
    const double level_k1 = (k < levels) ? level_values(k) : 0.0;
    rep.delta = level_k - level_k1 - perturbation_norm;
    rep.conditions_met[3] = rep.delta > 0.0;

    const Eigen::MatrixXd head_basis = eig.eigenvectors.leftCols(k);
    rep.f_detected = kmeans_objective_against_basis(head_basis, detected);
    KMeansParams oracle_params;
    oracle_params.restarts = f_star_restarts;
    oracle_params.seed = 0xF57AB1EULL;
    rep.f_star = kmeans_rows(head_basis, k, oracle_params).objective;

    rep.lhs_value = std::sqrt(rep.f_detected) - std::sqrt((1.0 + epsilon) * rep.f_star);
    if (rep.conditions_met[1] && rep.conditions_met[3]) {
        const double g2 = rep.gamma_exact * rep.gamma_exact;
        rep.rhs_bound = (2.0 + epsilon) * std::sqrt(2.0 * k) *
                        (std::sqrt(g2 / (1.0 + g2)) + perturbation_norm / rep.delta);
    } else {
        rep.rhs_bound = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace

TheoryReport theorem1_report(const Graph& g, const FilterSpec& f, const SketchMatrix& b,
                             const Eigen::MatrixXd& c_hat, const DetectionResult& detection,
                             double epsilon, int f_star_restarts) {
    const LaplacianEig eig = eig_laplacian(g);
    const FrequencyResponse h = freq_response(f, eig);
    const Eigen::MatrixXd hb = filtered_sketch(eig, h, b.b);
    const Eigen::MatrixXd c_bar = hb * hb.transpose();
    const double perturbation = spectral_norm(c_hat - c_bar);
    // eigenvalues of the noiseless covariance are the squared sketch
    // singular values
    const SvdThin svd = svd_thin(hb);
    const Eigen::VectorXd levels = svd.s.array().square();
    return bound_report(eig, h, b.b, levels, perturbation, detection.partition, epsilon,
                        f_star_restarts);
}

TheoryReport theorem1_report(const Graph& g, const FilterSpec& f, const SketchMatrix& b,
                             const SignalBatch& batch, const DetectionResult& detection,
                             double epsilon, int f_star_restarts) {
    return theorem1_report(g, f, b, sample_covariance(batch), detection, epsilon, f_star_restarts);
}

TheoryReport corollary1_report(const Graph& g, const FilterSpec& f, const SketchMatrix& b,
                               const DecompositionSolution& sol, const DetectionResult& detection,
                               double epsilon, int f_star_restarts) {
    const LaplacianEig eig = eig_laplacian(g);
    FrequencyResponse h = freq_response(f, eig);
    // Shift the response so it vanishes at the top of the spectrum; this is
    // the filter the low-rank part of the decomposition estimates.
    h.values.array() -= h.values(h.values.size() - 1);
    const Eigen::MatrixXd shifted_sketch = filtered_sketch(eig, h, b.b);
    const double perturbation = spectral_norm(sol.s_star - shifted_sketch);
    const SvdThin svd = svd_thin(shifted_sketch);
    return bound_report(eig, h, b.b, svd.s, perturbation, detection.partition, epsilon,
                        f_star_restarts);
}

double error_rate(const Partition& detected, const Partition& truth) {
    if (detected.assignment.size() != truth.assignment.size()) {
        throw std::invalid_argument("error_rate: partitions cover different node counts");
    }
    const int n = static_cast<int>(truth.assignment.size());
    if (n == 0) return 0.0;
    const int k = std::max(detected.k, truth.k);
    if (k > 8) {
        throw std::invalid_argument("error_rate: more than 8 communities; permutation search refused");
    }
    validate_partition(detected, n);
    validate_partition(truth, n);

    // confusion[a][b]: nodes labeled a by `detected` and b by `truth`
    std::vector<std::vector<int>> confusion(k, std::vector<int>(k, 0));
    for (int i = 0; i < n; ++i) ++confusion[detected.assignment[i]][truth.assignment[i]];

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    int best_match = -1;
    do {
        int match = 0;
        for (int a = 0; a < k; ++a) match += confusion[a][perm[a]];
        best_match = std::max(best_match, match);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(n - best_match) / n;
}

} // namespace blindcd
