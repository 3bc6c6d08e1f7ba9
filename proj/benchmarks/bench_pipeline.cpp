#include "blindcd/analysis.hpp"
#include "blindcd/boosting.hpp"
#include "blindcd/detect.hpp"
#include "blindcd/excitation.hpp"
#include "blindcd/graph.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace blindcd;

std::pair<Graph, Partition> bench_graph(int n) {
    const double logn = std::log(static_cast<double>(n));
    return sbm_generate({n, 3, 8.0 * logn / n, logn / n, 7});
}

void BM_EigLaplacian(benchmark::State& state) {
    auto [g, truth] = bench_graph(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        LaplacianEig eig = eig_laplacian(g);
        benchmark::DoNotOptimize(eig.eigenvalues.sum());
    }
}
BENCHMARK(BM_EigLaplacian)->Arg(150)->Arg(300)->Arg(600);

void BM_SampleCovariance(benchmark::State& state) {
    auto [g, truth] = bench_graph(150);
    const LaplacianEig eig = eig_laplacian(g);
    const SketchMatrix sketch = gen_sketch(RowBernoulliMode{0.5}, 150, 15, 11);
    const SignalBatch batch = gen_signals(eig, DiffusionFilter{0.0, 16}, sketch,
                                          static_cast<int>(state.range(0)), 1e-2,
                                          LatentDist::uniform_pm1, 13);
    for (auto _ : state) {
        Eigen::MatrixXd cov = sample_covariance(batch);
        benchmark::DoNotOptimize(cov(0, 0));
    }
}
BENCHMARK(BM_SampleCovariance)->Arg(1000)->Arg(10000);

void BM_BlindCD(benchmark::State& state) {
    auto [g, truth] = bench_graph(150);
    const LaplacianEig eig = eig_laplacian(g);
    const SketchMatrix sketch = gen_sketch(RowBernoulliMode{0.5}, 150, 15, 11);
    const SignalBatch batch =
        gen_signals(eig, DiffusionFilter{0.0, 16}, sketch, 1000, 1e-2, LatentDist::uniform_pm1, 13);
    KMeansParams km;
    km.seed = 5;
    for (auto _ : state) {
        DetectionResult det = blind_cd(batch, 3, km);
        benchmark::DoNotOptimize(det.partition.assignment.data());
    }
}
BENCHMARK(BM_BlindCD);

void BM_Decompose(benchmark::State& state) {
    auto [g, truth] = bench_graph(150);
    const LaplacianEig eig = eig_laplacian(g);
    const int r = static_cast<int>(state.range(0));
    const SketchMatrix sketch = gen_sketch(RowBernoulliMode{0.5}, 150, r, 11);
    const SignalBatch batch =
        gen_signals(eig, DiffusionFilter{0.0, 16}, sketch, 1000, 1e-2, LatentDist::uniform_pm1, 13);
    const LseSketch lse = lse_sketch(batch);
    DecompositionProblem prob;
    prob.kappa = 2.0 / std::sqrt(1000.0);
    prob.rho = 0.5 / std::sqrt(r * 1000.0);
    prob.max_iter = 200; // fixed iteration budget for stable timing
    prob.tol = 0.0;
    for (auto _ : state) {
        DecompositionSolution sol = decompose(lse.h_star, prob);
        benchmark::DoNotOptimize(sol.s_star(0, 0));
    }
}
BENCHMARK(BM_Decompose)->Arg(15)->Arg(45);

void BM_KMeansRows(benchmark::State& state) {
    auto [g, truth] = bench_graph(150);
    const LaplacianEig eig = eig_laplacian(g);
    KMeansParams km;
    km.seed = 5;
    km.restarts = 10;
    const Eigen::MatrixXd rows = eig.eigenvectors.leftCols(3);
    for (auto _ : state) {
        KMeansResult res = kmeans_rows(rows, 3, km);
        benchmark::DoNotOptimize(res.objective);
    }
}
BENCHMARK(BM_KMeansRows);

} // namespace

BENCHMARK_MAIN();
