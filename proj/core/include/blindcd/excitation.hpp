#pragma once

#include "blindcd/filters.hpp"
#include "blindcd/graph.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

namespace blindcd {

/// R uniformly chosen rows, each filled i.i.d. Bernoulli(p_b); all other
/// rows zero.
struct RowBernoulliMode {
    double p_b = 0.5;
};

/// Rows indexed by a uniformly chosen subset carry the R x R identity, all
/// other rows are zero.
struct IdentitySubsetMode {};

/// Binary bipartite support with i.i.d. Bernoulli(connectivity) entries;
/// weights are assigned downstream when the support is combined with a graph
/// under joint row normalization.
struct BipartiteMode {
    double connectivity = 0.1;
};

using SketchMode = std::variant<RowBernoulliMode, IdentitySubsetMode, BipartiteMode>;

struct SketchMatrix {
    Eigen::MatrixXd b; // N x R
    SketchMode mode;
    std::uint64_t seed = 0;
    // Chosen row indices (row-Bernoulli) or subset indices (identity-subset),
    // ascending; empty for bipartite support.
    std::vector<int> selected_rows;
};

SketchMatrix gen_sketch(const SketchMode& mode, int n, int r, std::uint64_t seed);

enum class LatentDist { uniform_pm1, standard_normal };

/// Observations y (N x L) with the latent draws z (R x L) that produced them.
/// Column l of y is filter(B z_l) + noise_l by construction.
struct SignalBatch {
    Eigen::MatrixXd y;
    Eigen::MatrixXd z;
    double w_sigma2 = 0.0;
    std::uint64_t seed = 0;
    LatentDist latent = LatentDist::uniform_pm1;
    bool latent_rescaled = true;
};

// Draws z columns i.i.d. from the latent distribution, adds Gaussian noise
// of variance sigma_w2 per entry. With rescale_latent, uniform latents are
// scaled by sqrt(3) so their second moment is the identity.
SignalBatch gen_signals(const LaplacianEig& eig, const FilterSpec& f, const SketchMatrix& b, int l,
                        double sigma_w2, LatentDist latent, std::uint64_t seed,
                        bool rescale_latent = true);
SignalBatch gen_signals(const Graph& g, const FilterSpec& f, const SketchMatrix& b, int l,
                        double sigma_w2, LatentDist latent, std::uint64_t seed,
                        bool rescale_latent = true);

// Raw second moment (1/L) sum_l y_l y_l^T; the model is zero-mean so no mean
// is subtracted.
Eigen::MatrixXd sample_covariance(const SignalBatch& batch);

// Noiseless covariance H(L) B B^T H(L)^T through the spectral filter path.
Eigen::MatrixXd true_covariance(const LaplacianEig& eig, const FilterSpec& f, const SketchMatrix& b);
Eigen::MatrixXd true_covariance(const Graph& g, const FilterSpec& f, const SketchMatrix& b);

/// Equilibrium-consumption batch: y_l = (b I - A)^-1 (a 1 - p_l) with prices
/// p_l = 1 + B z_l, reported after empirical mean removal. The stored z is
/// mean-removed to match. exact_map holds (b I - A)^-1.
struct PricingBatch {
    SignalBatch batch;
    double b_param = 0.0;
    double a_param = 0.0;
    Eigen::MatrixXd exact_map;
};

// sigma_w2 < 0 requests the scenario default (0.1 / b^2)^2.
PricingBatch pricing_game_batch(const Graph& g, const SketchMatrix& sketch, int l, double sigma_w2,
                                LatentDist latent, std::uint64_t seed);

/// Steady-state opinion batch: y_l = (I - A_rw)^-1 B_rw z_l where [A_rw B_rw]
/// is the jointly row-normalized pair built from the graph and the bipartite
/// support. approx_gap reports the relative error of the single-pole IIR
/// surrogate c^-1 (I + L/c)^-1 B against the exact solve.
struct DegrootBatch {
    SignalBatch batch;
    Eigen::MatrixXd row_norm_a;
    Eigen::MatrixXd row_norm_b;
    double c_est = 0.0;
    double approx_gap = 0.0;
};

DegrootBatch degroot_batch(const Graph& g, const SketchMatrix& support, int l, double sigma_w2,
                           LatentDist latent, std::uint64_t seed);

} // namespace blindcd
