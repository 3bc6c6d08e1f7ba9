#pragma once

#include "blindcd/boosting.hpp"
#include "blindcd/detect.hpp"
#include "blindcd/serialization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace blindcd {

enum class Scenario { diffusion, pricing, degroot, edge_list };

struct SbmSource {
    int n = 150;
    int k = 3;
    double a = 0.0;
    double b = 0.0;
};

struct EdgeListSource {
    std::string path;
    std::string labels_path;
    Indexing indexing = Indexing::zero;
    bool weighted = false;
    int k = 0; // 0: take the community count from the labels file
};

struct DecompositionConfig {
    Regularizer reg = Regularizer::element_l1;
    double kappa_scale = 2.0; // kappa = kappa_scale / sqrt(L)
    double rho_scale = 0.5;   // rho = rho_scale / sqrt(R * L)
    double alpha = std::numeric_limits<double>::infinity();
    double step = 0.5;
    int max_iter = 5000;
    double tol = 1e-7;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::diffusion;
    std::optional<SbmSource> sbm;
    std::optional<EdgeListSource> edge_list;
    std::optional<FilterSpec> filter; // diffusion / edge_list scenarios only
    SketchMode excitation_mode = RowBernoulliMode{};
    int r = 15;
    int l = 1000;
    double sigma_w2 = 1e-2;
    bool sigma_auto = false; // scenario-specific default noise level
    LatentDist latent = LatentDist::uniform_pm1;
    bool rescale_latent = true;
    std::vector<Method> methods = {Method::blind};
    std::optional<DecompositionConfig> decomposition;
    std::vector<int> sweep_l;
    std::vector<int> sweep_r;
    std::vector<int> sweep_t_d;
    std::vector<std::uint64_t> seeds = {1};
    KMeansParams kmeans;
    bool emit_theory = false;
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
    std::uint64_t seed = 0;
    int l = 0;
    int r = 0;
    int t_d = 0;
    double sigma_w2 = 0.0;
    std::string method;
    double pe = 0.0;
    double ratio_cut_value = 0.0;
    double f_objective = 0.0;
    double runtime_ms = 0.0;
    std::optional<double> eta, gamma, delta, bound_lhs, bound_rhs;
    std::string status = "ok";
    bool ok() const { return status == "ok"; }
};

// Runs every (seed, sweep point, method) trial; failures become rows with a
// status message instead of aborting the sweep. Rows come back sorted by
// (seed, l, r, t_d, method) regardless of the number of worker threads.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, int jobs = 1);

// Fixed-order CSV with a header row; timing can be suppressed for byte-exact
// reproducibility checks.
void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                      bool include_runtime = true);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

} // namespace blindcd
