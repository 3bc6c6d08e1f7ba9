#include "blindcd/excitation.hpp"

#include "blindcd/rng.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace blindcd {

namespace {

std::vector<int> sample_distinct_rows(int n, int r, std::mt19937_64& rng) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < r; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<int> rows(pool.begin(), pool.begin() + r);
    std::sort(rows.begin(), rows.end());
    return rows;
}

Eigen::MatrixXd draw_latents(int r, int l, LatentDist latent, bool rescale, std::uint64_t seed) {
    Eigen::MatrixXd z(r, l);
    const double scale = (latent == LatentDist::uniform_pm1 && rescale) ? std::sqrt(3.0) : 1.0;
    for (int col = 0; col < l; ++col) {
        auto rng = make_rng(seed, 2ULL * static_cast<std::uint64_t>(col));
        if (latent == LatentDist::uniform_pm1) {
            std::uniform_real_distribution<double> unif(-1.0, 1.0);
            for (int i = 0; i < r; ++i) z(i, col) = scale * unif(rng);
        } else {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int i = 0; i < r; ++i) z(i, col) = normal(rng);
        }
    }
    return z;
}

Eigen::MatrixXd draw_noise(int n, int l, double sigma_w2, std::uint64_t seed) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, l);
    if (sigma_w2 <= 0.0) return w;
    const double sigma = std::sqrt(sigma_w2);
    for (int col = 0; col < l; ++col) {
        auto rng = make_rng(seed, 2ULL * static_cast<std::uint64_t>(col) + 1ULL);
        std::normal_distribution<double> normal(0.0, sigma);
        for (int i = 0; i < n; ++i) w(i, col) = normal(rng);
    }
    return w;
}

} // namespace

SketchMatrix gen_sketch(const SketchMode& mode, int n, int r, std::uint64_t seed) {
    if (r < 1 || r > n) {
        throw std::invalid_argument("gen_sketch: need 1 <= r <= n");
    }
    SketchMatrix out;
    out.mode = mode;
    out.seed = seed;
    out.b = Eigen::MatrixXd::Zero(n, r);
    auto rng = make_rng(seed, 0);

    if (const auto* rb = std::get_if<RowBernoulliMode>(&mode)) {
        if (!(rb->p_b >= 0.0 && rb->p_b <= 1.0)) {
            throw std::invalid_argument("gen_sketch: p_b must lie in [0,1]");
        }
        out.selected_rows = sample_distinct_rows(n, r, rng);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int row : out.selected_rows) {
            for (int j = 0; j < r; ++j) out.b(row, j) = (unif(rng) < rb->p_b) ? 1.0 : 0.0;
        }
    } else if (std::get_if<IdentitySubsetMode>(&mode)) {
        out.selected_rows = sample_distinct_rows(n, r, rng);
        for (int j = 0; j < r; ++j) out.b(out.selected_rows[j], j) = 1.0;
    } else if (const auto* bp = std::get_if<BipartiteMode>(&mode)) {
        if (!(bp->connectivity >= 0.0 && bp->connectivity <= 1.0)) {
            throw std::invalid_argument("gen_sketch: connectivity must lie in [0,1]");
        }
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < r; ++j) out.b(i, j) = (unif(rng) < bp->connectivity) ? 1.0 : 0.0;
        }
    }
    return out;
}

SignalBatch gen_signals(const LaplacianEig& eig, const FilterSpec& f, const SketchMatrix& b, int l,
                        double sigma_w2, LatentDist latent, std::uint64_t seed, bool rescale_latent) {
    const int n = static_cast<int>(eig.eigenvectors.rows());
    if (b.b.rows() != n) {
        throw std::invalid_argument("gen_signals: sketch row count does not match the graph");
    }
    if (l < 0) throw std::invalid_argument("gen_signals: l must be nonnegative");
    if (sigma_w2 < 0.0) throw std::invalid_argument("gen_signals: sigma_w2 must be nonnegative");

    SignalBatch batch;
    batch.w_sigma2 = sigma_w2;
    batch.seed = seed;
    batch.latent = latent;
    batch.latent_rescaled = rescale_latent;
    const int r = static_cast<int>(b.b.cols());
    batch.z = draw_latents(r, l, latent, rescale_latent, seed);
    const Eigen::MatrixXd filtered_sketch = apply_filter(f, eig, b.b);
    batch.y = filtered_sketch * batch.z + draw_noise(n, l, sigma_w2, seed);
    return batch;
}

SignalBatch gen_signals(const Graph& g, const FilterSpec& f, const SketchMatrix& b, int l,
                        double sigma_w2, LatentDist latent, std::uint64_t seed, bool rescale_latent) {
    return gen_signals(eig_laplacian(g), f, b, l, sigma_w2, latent, seed, rescale_latent);
}

Eigen::MatrixXd sample_covariance(const SignalBatch& batch) {
    const int l = static_cast<int>(batch.y.cols());
    if (l < 1) throw std::invalid_argument("sample_covariance: need at least one signal");
    const int n = static_cast<int>(batch.y.rows());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(batch.y, 1.0 / l);
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov;
}

Eigen::MatrixXd true_covariance(const LaplacianEig& eig, const FilterSpec& f, const SketchMatrix& b) {
    const Eigen::MatrixXd filtered_sketch = apply_filter(f, eig, b.b);
    const int n = static_cast<int>(filtered_sketch.rows());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(filtered_sketch, 1.0);
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov;
}

Eigen::MatrixXd true_covariance(const Graph& g, const FilterSpec& f, const SketchMatrix& b) {
    return true_covariance(eig_laplacian(g), f, b);
}

PricingBatch pricing_game_batch(const Graph& g, const SketchMatrix& sketch, int l, double sigma_w2,
                                LatentDist latent, std::uint64_t seed) {
    const int n = g.n();
    if (sketch.b.rows() != n) {
        throw std::invalid_argument("pricing_game_batch: sketch row count does not match the graph");
    }
    const int r = static_cast<int>(sketch.b.cols());

    PricingBatch out;
    out.b_param = 2.0 * g.adjacency().rowwise().sum().maxCoeff();
    if (out.b_param <= 0.0) out.b_param = 1.0; // empty graph: any b > 0 works
    if (sigma_w2 < 0.0) sigma_w2 = std::pow(0.1 / (out.b_param * out.b_param), 2);

    Eigen::MatrixXd z = draw_latents(r, l, latent, /*rescale=*/false, seed);
    Eigen::MatrixXd prices = (sketch.b * z).colwise() + Eigen::VectorXd::Ones(n);
    out.a_param = (l > 0) ? 2.0 * prices.cwiseAbs().maxCoeff() : 2.0;

    Eigen::MatrixXd system = out.b_param * Eigen::MatrixXd::Identity(n, n) - g.adjacency();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    out.exact_map = lu.inverse();

    Eigen::MatrixXd rhs = (-prices).colwise() + Eigen::VectorXd::Constant(n, out.a_param);
    Eigen::MatrixXd y = out.exact_map * rhs + draw_noise(n, l, sigma_w2, seed);

    SignalBatch& batch = out.batch;
    batch.w_sigma2 = sigma_w2;
    batch.seed = seed;
    batch.latent = latent;
    batch.latent_rescaled = false;
    if (l > 0) {
        // Empirical mean removal; the centered signals satisfy
        // y_centered = exact_map * B * z_centered + centered noise.
        const Eigen::VectorXd y_mean = y.rowwise().mean();
        const Eigen::VectorXd z_mean = z.rowwise().mean();
        batch.y = (-y).colwise() + y_mean; // mean(y) - y_l = exact_map (p_l - mean(p))
        batch.z = z.colwise() - z_mean;
    } else {
        batch.y.resize(n, 0);
        batch.z.resize(r, 0);
    }
    return out;
}

DegrootBatch degroot_batch(const Graph& g, const SketchMatrix& support, int l, double sigma_w2,
                           LatentDist latent, std::uint64_t seed) {
    const int n = g.n();
    if (support.b.rows() != n) {
        throw std::invalid_argument("degroot_batch: support row count does not match the graph");
    }
    const int r = static_cast<int>(support.b.cols());
    if (sigma_w2 < 0.0) sigma_w2 = 1e-2;

    DegrootBatch out;
    out.row_norm_a = Eigen::MatrixXd::Zero(n, n);
    out.row_norm_b = Eigen::MatrixXd::Zero(n, r);
    const Eigen::MatrixXd& adj = g.adjacency();
    for (int i = 0; i < n; ++i) {
        int deg_a = 0, deg_b = 0;
        for (int j = 0; j < n; ++j) deg_a += adj(i, j) > 0.0 ? 1 : 0;
        for (int j = 0; j < r; ++j) deg_b += support.b(i, j) > 0.0 ? 1 : 0;
        if (deg_a + deg_b == 0) {
            // isolated agent: attach it to one stubborn agent so the
            // steady state stays well defined
            out.row_norm_b(i, i % r) = 1.0;
            continue;
        }
        const double w = 1.0 / (deg_a + deg_b);
        for (int j = 0; j < n; ++j) {
            if (adj(i, j) > 0.0) out.row_norm_a(i, j) = w;
        }
        for (int j = 0; j < r; ++j) {
            if (support.b(i, j) > 0.0) out.row_norm_b(i, j) = w;
        }
    }
    out.c_est = out.row_norm_b.rowwise().sum().mean();

    Eigen::MatrixXd z = draw_latents(r, l, latent, /*rescale=*/false, seed);
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - out.row_norm_a;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    Eigen::MatrixXd rhs = out.row_norm_b * z;
    Eigen::MatrixXd y_exact = lu.solve(rhs);
    const double residual = (system * y_exact - rhs).norm();
    if (!(residual <= 1e-8 * (1.0 + rhs.norm()))) {
        throw std::runtime_error("degroot_batch: steady-state solve failed; "
                                 "stubborn influence does not reach every agent");
    }

    // Single-pole IIR surrogate on the symmetrized row-normalized graph.
    if (l > 0 && out.c_est > 0.0) {
        Eigen::MatrixXd sym = 0.5 * (out.row_norm_a + out.row_norm_a.transpose());
        sym.diagonal().setZero();
        Graph sym_graph(std::move(sym));
        const LaplacianEig eig = eig_laplacian(sym_graph);
        SinglePoleIirFilter iir{out.c_est};
        const Eigen::MatrixXd y_approx = apply_filter(FilterSpec{iir}, eig, rhs) / out.c_est;
        const double denom = y_exact.norm();
        out.approx_gap = denom > 0.0 ? (y_exact - y_approx).norm() / denom : 0.0;
    }

    SignalBatch& batch = out.batch;
    batch.w_sigma2 = sigma_w2;
    batch.seed = seed;
    batch.latent = latent;
    batch.latent_rescaled = false;
    batch.z = std::move(z);
    batch.y = y_exact + draw_noise(n, l, sigma_w2, seed);
    return out;
}

} // namespace blindcd
