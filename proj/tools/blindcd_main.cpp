// Command line front end: seeded experiment sweeps, signal generation, and
// single-instance bound reports, all driven by JSON configs.

#include "blindcd/analysis.hpp"
#include "blindcd/harness.hpp"
#include "blindcd/serialization.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using blindcd::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

blindcd::ExperimentConfig load_config(const std::string& config_path, const std::string& preset_name) {
    if (!config_path.empty() && !preset_name.empty()) {
        throw CLI::ValidationError("use either --config or --preset, not both");
    }
    if (!preset_name.empty()) {
        return blindcd::preset(preset_name);
    }
    if (config_path.empty()) {
        throw CLI::ValidationError("one of --config or --preset is required");
    }
    std::ifstream in(config_path);
    if (!in) {
        throw std::invalid_argument("cannot open config file " + config_path);
    }
    json j = json::parse(in);
    return blindcd::config_from_json(j);
}

void apply_seed_override(blindcd::ExperimentConfig& cfg, std::optional<std::uint64_t> seed) {
    if (seed) cfg.seeds = {*seed};
}

int cmd_run(const std::string& config_path, const std::string& preset_name, const std::string& out_path,
            int jobs, std::optional<std::uint64_t> seed, bool no_timing) {
    blindcd::ExperimentConfig cfg = load_config(config_path, preset_name);
    apply_seed_override(cfg, seed);
    const auto rows = blindcd::run_experiment(cfg, jobs);
    if (out_path.empty() || out_path == "-") {
        blindcd::write_result_csv(std::cout, rows, !no_timing);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file " + out_path);
        blindcd::write_result_csv(out, rows, !no_timing);
    }
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (!r.ok()) ++failed;
    }
    if (failed > 0) {
        std::cerr << failed << " of " << rows.size() << " trials failed (see status column)\n";
    }
    return kExitOk;
}

int cmd_generate(const std::string& config_path, const std::string& preset_name,
                 const std::string& outdir, std::optional<std::uint64_t> seed) {
    blindcd::ExperimentConfig cfg = load_config(config_path, preset_name);
    apply_seed_override(cfg, seed);
    std::filesystem::create_directories(outdir);
    const std::filesystem::path dir(outdir);

    // Single instance: first seed, scalar sweep values.
    blindcd::ExperimentConfig single = cfg;
    single.sweep_l.clear();
    single.sweep_r.clear();
    single.sweep_t_d.clear();
    if (!cfg.sweep_l.empty()) single.l = cfg.sweep_l.front();
    if (!cfg.sweep_r.empty()) single.r = cfg.sweep_r.front();
    if (!cfg.sweep_t_d.empty()) {
        if (auto* diff = std::get_if<blindcd::DiffusionFilter>(&*single.filter)) {
            diff->t_d = cfg.sweep_t_d.front();
        }
    }
    const std::uint64_t s = single.seeds.front();

    blindcd::Graph graph = [&]() {
        if (single.sbm) {
            blindcd::SbmParams p{single.sbm->n, single.sbm->k, single.sbm->a, single.sbm->b, s};
            auto [g, truth] = blindcd::sbm_generate(p);
            std::ofstream labels(dir / "truth.labels");
            for (int c : truth.assignment) labels << c << '\n';
            return g;
        }
        return blindcd::load_edge_list(single.edge_list->path, single.edge_list->indexing,
                                       single.edge_list->weighted);
    }();

    std::ofstream gj(dir / "graph.json");
    gj << blindcd::graph_to_json(graph).dump(2) << '\n';

    const blindcd::SketchMatrix sketch =
        blindcd::gen_sketch(single.excitation_mode, graph.n(), single.r, s + 1);
    blindcd::SignalBatch batch;
    switch (single.scenario) {
        case blindcd::Scenario::pricing:
            batch = blindcd::pricing_game_batch(graph, sketch, single.l,
                                                single.sigma_auto ? -1.0 : single.sigma_w2,
                                                single.latent, s + 2)
                        .batch;
            break;
        case blindcd::Scenario::degroot:
            batch = blindcd::degroot_batch(graph, sketch, single.l,
                                           single.sigma_auto ? -1.0 : single.sigma_w2, single.latent,
                                           s + 2)
                        .batch;
            break;
        default:
            batch = blindcd::gen_signals(graph, *single.filter, sketch, single.l,
                                         single.sigma_auto ? 1e-2 : single.sigma_w2, single.latent,
                                         s + 2, single.rescale_latent);
    }
    blindcd::save_matrix_binary((dir / "y.bmc").string(), batch.y);
    blindcd::save_matrix_binary((dir / "z.bmc").string(), batch.z);
    blindcd::save_matrix_csv((dir / "y.csv").string(), batch.y);
    json meta{{"sigma_w2", batch.w_sigma2},
              {"seed", batch.seed},
              {"latent", batch.latent == blindcd::LatentDist::uniform_pm1 ? "uniform_pm1"
                                                                          : "standard_normal"},
              {"latent_rescaled", batch.latent_rescaled},
              {"config", blindcd::config_to_json(single)}};
    std::ofstream mj(dir / "meta.json");
    mj << meta.dump(2) << '\n';
    std::cout << "wrote graph.json, y.bmc, z.bmc, y.csv, meta.json to " << outdir << '\n';
    return kExitOk;
}

int cmd_theory(const std::string& config_path, const std::string& preset_name,
               const std::string& out_path, std::optional<std::uint64_t> seed,
               const std::string& trace_path) {
    blindcd::ExperimentConfig cfg = load_config(config_path, preset_name);
    apply_seed_override(cfg, seed);
    // single instance: first sweep values stand in for the scalars
    if (!cfg.sweep_l.empty()) cfg.l = cfg.sweep_l.front();
    if (!cfg.sweep_r.empty()) cfg.r = cfg.sweep_r.front();
    if (!cfg.sweep_t_d.empty() && cfg.filter) {
        if (auto* diff = std::get_if<blindcd::DiffusionFilter>(&*cfg.filter)) {
            diff->t_d = cfg.sweep_t_d.front();
        }
    }
    if (!(cfg.scenario == blindcd::Scenario::diffusion ||
          cfg.scenario == blindcd::Scenario::edge_list)) {
        throw std::invalid_argument("theory reports need an explicit filter (diffusion or edge_list "
                                    "scenario)");
    }
    const std::uint64_t s = cfg.seeds.front();
    blindcd::Graph graph = [&]() {
        if (cfg.sbm) {
            blindcd::SbmParams p{cfg.sbm->n, cfg.sbm->k, cfg.sbm->a, cfg.sbm->b, s};
            return blindcd::sbm_generate(p).first;
        }
        return blindcd::load_edge_list(cfg.edge_list->path, cfg.edge_list->indexing,
                                       cfg.edge_list->weighted);
    }();
    const int k = cfg.sbm ? cfg.sbm->k
                          : (cfg.edge_list->k > 0 ? cfg.edge_list->k
                                                  : blindcd::load_labels(cfg.edge_list->labels_path).k);

    const blindcd::SketchMatrix sketch =
        blindcd::gen_sketch(cfg.excitation_mode, graph.n(), cfg.r, s + 1);
    const blindcd::SignalBatch batch =
        blindcd::gen_signals(graph, *cfg.filter, sketch, cfg.l, cfg.sigma_auto ? 1e-2 : cfg.sigma_w2,
                             cfg.latent, s + 2, cfg.rescale_latent);
    blindcd::KMeansParams km = cfg.kmeans;
    km.seed = s + 3;

    json out = json::object();
    const blindcd::DetectionResult blind = blindcd::blind_cd(batch, k, km);
    out["blind"] = blindcd::theory_report_to_json(
        blindcd::theorem1_report(graph, *cfg.filter, sketch, batch, blind, 0.0));
    const bool want_boosted = std::find(cfg.methods.begin(), cfg.methods.end(),
                                        blindcd::Method::boosted) != cfg.methods.end();
    if (want_boosted && cfg.decomposition) {
        blindcd::DecompositionProblem prob;
        prob.kappa = cfg.decomposition->kappa_scale / std::sqrt(static_cast<double>(cfg.l));
        prob.rho = cfg.decomposition->rho_scale / std::sqrt(static_cast<double>(cfg.r) * cfg.l);
        prob.alpha = cfg.decomposition->alpha;
        prob.reg = cfg.decomposition->reg;
        prob.step = cfg.decomposition->step;
        prob.max_iter = cfg.decomposition->max_iter;
        prob.tol = cfg.decomposition->tol;
        const blindcd::BoostedRun run = blindcd::boosted_blind_cd_full(batch, k, prob, km);
        out["boosted"] = blindcd::theory_report_to_json(
            blindcd::corollary1_report(graph, *cfg.filter, sketch, run.solution, run.detection, 0.0));
        if (!trace_path.empty()) {
            blindcd::save_trace_csv(trace_path, run.solution.objective_trace);
        }
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << out.dump(2) << '\n';
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open output file " + out_path);
        f << out.dump(2) << '\n';
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blindcd: community detection from filtered graph signals"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_path, outdir = "generated";
    int jobs = 1;
    bool no_timing = false;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--config", config_path, "JSON experiment config");
        cmd->add_option("--preset", preset_name, "named preset (see `blindcd presets`)");
        cmd->add_option("--seed", seed, "override the config's seed list with a single seed");
        if (with_out) cmd->add_option("--out", out_path, "output path ('-' for stdout)");
    };

    CLI::App* run = app.add_subcommand("run", "run a sweep and emit a results CSV");
    add_common(run, true);
    run->add_option("--jobs", jobs, "worker threads (0 = hardware concurrency)");
    run->add_flag("--no-timing", no_timing, "omit per-trial timings for byte-stable output");

    CLI::App* gen = app.add_subcommand("generate", "write a graph and one signal batch to files");
    add_common(gen, false);
    gen->add_option("--outdir", outdir, "output directory");

    std::string trace_path;
    CLI::App* theory = app.add_subcommand("theory", "single-instance bound report as JSON");
    add_common(theory, true);
    theory->add_option("--trace-out", trace_path,
                       "write the boosted solver's objective trace as CSV");

    bool emit = false;
    std::string emit_name;
    CLI::App* presets = app.add_subcommand("presets", "list named presets");
    presets->add_option("--emit", emit_name, "print the JSON config of one preset")
        ->expected(1)
        ->each([&emit](const std::string&) { emit = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, preset_name, out_path, jobs, seed, no_timing);
        if (gen->parsed()) return cmd_generate(config_path, preset_name, outdir, seed);
        if (theory->parsed()) return cmd_theory(config_path, preset_name, out_path, seed, trace_path);
        if (presets->parsed()) {
            if (emit) {
                std::cout << blindcd::config_to_json(blindcd::preset(emit_name)).dump(2) << '\n';
            } else {
                for (const auto& name : blindcd::preset_names()) std::cout << name << '\n';
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
