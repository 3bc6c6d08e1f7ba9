#include "blindcd/analysis.hpp"
#include "blindcd/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace blindcd;

namespace {

struct Instance {
    Graph graph;
    Partition truth;
    LaplacianEig eig;
    SketchMatrix sketch;
    FilterSpec filter;
};

Instance random_instance(std::uint64_t seed, int n = 30, int k = 3, int r = 6, int t_d = 8) {
    auto [g, truth] = sbm_generate({n, k, 0.8, 0.05, seed});
    LaplacianEig eig = eig_laplacian(g);
    SketchMatrix sk = gen_sketch(RowBernoulliMode{0.5}, n, r, seed * 31 + 1);
    return {std::move(g), std::move(truth), std::move(eig), std::move(sk),
            DiffusionFilter{0.0, t_d}};
}

} // namespace

TEST_CASE("gamma vanishes for the ideal filter") {
    const Instance inst = random_instance(601);
    const FrequencyResponse h = freq_response(IdealLowPassFilter{3}, inst.eig);
    CHECK(gamma_exact(inst.eig, h, inst.sketch.b, 3) == doctest::Approx(0.0));
}

TEST_CASE("gamma vanishes for a perfectly aligned sketch") {
    const Instance inst = random_instance(607);
    const FrequencyResponse h = freq_response(std::get<DiffusionFilter>(inst.filter), inst.eig);
    const Eigen::MatrixXd aligned = inst.eig.eigenvectors.leftCols(3);
    CHECK(gamma_exact(inst.eig, h, aligned, 3) <= 1e-10);
}

TEST_CASE("gamma is invariant to a positive rescale of the response") {
    const Instance inst = random_instance(611);
    FrequencyResponse h = freq_response(std::get<DiffusionFilter>(inst.filter), inst.eig);
    const double base = gamma_exact(inst.eig, h, inst.sketch.b, 3);
    h.values *= 5.0;
    CHECK(gamma_exact(inst.eig, h, inst.sketch.b, 3) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("gamma bound basics and domination sweep") {
    CHECK(gamma_bound(0.0, 2.0, 3.0) == doctest::Approx(0.0));
    CHECK(gamma_bound(0.5, 0.0, 3.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(gamma_bound(-0.1, 1.0, 1.0), std::invalid_argument);

    // 200 random instances: the exact coefficient never exceeds the product bound
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const Instance inst = random_instance(seed, 30, 3, 6, 6 + static_cast<int>(seed % 8));
        const FrequencyResponse h = freq_response(std::get<DiffusionFilter>(inst.filter), inst.eig);
        double exact = 0.0;
        try {
            exact = gamma_exact(inst.eig, h, inst.sketch.b, 3);
        } catch (const std::runtime_error&) {
            continue; // rank condition violated; instance not admissible
        }
        const Eigen::MatrixXd hb = apply_filter(inst.filter, inst.eig, inst.sketch.b);
        const SvdThin svd = svd_thin(hb);
        const Eigen::MatrixXd bq = inst.sketch.b * svd.v.leftCols(3);
        const double tail_norm = spectral_norm(inst.eig.eigenvectors.rightCols(27).transpose() * bq);
        const Eigen::MatrixXd head = inst.eig.eigenvectors.leftCols(3).transpose() * bq;
        Eigen::JacobiSVD<Eigen::MatrixXd> head_svd(head);
        const double head_inv_norm = 1.0 / head_svd.singularValues()(2);
        const double eta = lowpass_coefficient(h, 3);
        const double bound = gamma_bound(eta, tail_norm, head_inv_norm);
        CHECK(exact <= bound + 1e-9);
        ++checked;
    }
    CHECK(checked >= 180);
}

TEST_CASE("projector identity holds exactly") {
    SUBCASE("ideal filter collapses both sides to zero") {
        const Instance inst = random_instance(613);
        const FrequencyResponse h = freq_response(IdealLowPassFilter{3}, inst.eig);
        const Prop2Check chk = prop2_identity_check(inst.eig, h, inst.sketch.b, 3);
        CHECK(chk.lhs <= 1e-12);
        CHECK(chk.rhs <= 1e-12);
    }
    SUBCASE("aligned sketch collapses both sides to zero") {
        const Instance inst = random_instance(617);
        const FrequencyResponse h = freq_response(std::get<DiffusionFilter>(inst.filter), inst.eig);
        const Prop2Check chk =
            prop2_identity_check(inst.eig, h, inst.eig.eigenvectors.leftCols(3), 3);
        CHECK(chk.lhs <= 1e-12);
        CHECK(chk.rhs <= 1e-12);
    }
    SUBCASE("random instances agree to eight digits") {
        int checked = 0;
        for (std::uint64_t seed = 701; seed <= 720; ++seed) {
            const Instance inst = random_instance(seed);
            const FrequencyResponse h =
                freq_response(std::get<DiffusionFilter>(inst.filter), inst.eig);
            try {
                const Prop2Check chk = prop2_identity_check(inst.eig, h, inst.sketch.b, 3);
                CHECK(chk.gap <= 1e-8);
                ++checked;
            } catch (const std::runtime_error&) {
            }
        }
        CHECK(checked >= 18);
    }
}

TEST_CASE("bound report on the noiseless ideal instance") {
    auto [g, truth] = sbm_generate({30, 3, 0.8, 0.05, 619});
    const LaplacianEig eig = eig_laplacian(g);
    auto rng = make_rng(620);
    SketchMatrix sk;
    sk.b = oracles::random_gaussian(30, 6, rng);
    const FilterSpec f = IdealLowPassFilter{3};
    const Eigen::MatrixXd c_bar = true_covariance(eig, f, sk);
    KMeansParams km;
    km.seed = 621;
    km.restarts = 20;
    const DetectionResult det = blind_cd_from_cov(c_bar, 3, km);
    const TheoryReport rep = theorem1_report(g, f, sk, c_bar, det, 0.0);
    CHECK(rep.all_conditions_met());
    CHECK(rep.eta == doctest::Approx(0.0));
    CHECK(rep.gamma_exact == doctest::Approx(0.0));
    CHECK(rep.cov_error_norm <= 1e-12);
    CHECK(std::abs(rep.lhs_value) <= 1e-9);
    CHECK(std::abs(rep.rhs_bound) <= 1e-9);
}

TEST_CASE("bound report flags a collapsed gap instead of claiming a bound") {
    const Instance inst = random_instance(631);
    const FrequencyResponse h = freq_response(std::get<DiffusionFilter>(inst.filter), inst.eig);
    const SignalBatch batch = gen_signals(inst.eig, inst.filter, inst.sketch, 3, 10.0,
                                          LatentDist::uniform_pm1, 632);
    KMeansParams km;
    km.seed = 633;
    const DetectionResult det = blind_cd(batch, 3, km);
    const TheoryReport rep = theorem1_report(inst.graph, inst.filter, inst.sketch, batch, det, 0.0);
    CHECK_FALSE(rep.conditions_met[3]); // the perturbation dwarfs the gap
    CHECK(std::isnan(rep.rhs_bound));
}

TEST_CASE("suboptimality bound holds on sampled instances") {
    int checked = 0;
    for (std::uint64_t seed = 801; seed <= 812; ++seed) {
        const Instance inst = random_instance(seed, 30, 3, 6, 6);
        const SignalBatch batch = gen_signals(inst.eig, inst.filter, inst.sketch, 30000, 1e-3,
                                              LatentDist::uniform_pm1, seed * 17);
        KMeansParams km;
        km.seed = seed * 19;
        km.restarts = 20;
        const DetectionResult det = blind_cd(batch, 3, km);
        // measured k-means slack: compare against a 10x restart probe
        KMeansParams probe = km;
        probe.restarts = 200;
        const KMeansResult better = kmeans_rows(det.basis_used.vectors, 3, probe);
        const double eps_hat =
            std::max(0.0, det.kmeans.objective / std::max(better.objective, 1e-300) - 1.0);
        const TheoryReport rep =
            theorem1_report(inst.graph, inst.filter, inst.sketch, batch, det, eps_hat);
        if (!rep.all_conditions_met()) continue;
        CHECK(rep.lhs_value <= rep.rhs_bound + 1e-9);
        ++checked;
    }
    CHECK(checked >= 6);
}

TEST_CASE("boosted bound report in the exact decomposition limit") {
    const Instance inst = random_instance(641);
    const FilterSpec f = SinglePoleIirFilter{1.0};
    FrequencyResponse h = freq_response(f, inst.eig);
    h.values.array() -= h.values(29);
    const Eigen::MatrixXd shifted_sketch =
        inst.eig.eigenvectors * h.values.asDiagonal() *
        (inst.eig.eigenvectors.transpose() * inst.sketch.b);
    DecompositionSolution sol;
    sol.s_star = shifted_sketch;
    sol.b_star = Eigen::MatrixXd::Zero(30, 6);

    KMeansParams km;
    km.seed = 642;
    DetectionResult det;
    det.method = Method::boosted;
    const SvdThin svd = svd_thin(shifted_sketch);
    det.basis_used.vectors = svd.u.leftCols(3);
    det.basis_used.values = svd.s.head(3);
    det.kmeans = kmeans_rows(det.basis_used.vectors, 3, km);
    det.partition = det.kmeans.partition;

    const TheoryReport rep = corollary1_report(inst.graph, f, inst.sketch, sol, det, 0.0);
    CHECK(rep.cov_error_norm <= 1e-12);
    if (rep.all_conditions_met()) {
        const double g2 = rep.gamma_exact * rep.gamma_exact;
        CHECK(rep.rhs_bound ==
              doctest::Approx(2.0 * std::sqrt(6.0) * std::sqrt(g2 / (1.0 + g2))).epsilon(1e-9));
        CHECK(rep.lhs_value <= rep.rhs_bound + 1e-9);
    }
}

TEST_CASE("boosted bound report gates on the shifted-sketch gap") {
    const Instance inst = random_instance(643);
    const FilterSpec f = SinglePoleIirFilter{1.0};
    DecompositionSolution sol;
    sol.s_star = Eigen::MatrixXd::Constant(30, 6, 100.0); // hopeless perturbation
    sol.b_star = Eigen::MatrixXd::Zero(30, 6);
    KMeansParams km;
    km.seed = 644;
    DetectionResult det;
    det.method = Method::boosted;
    det.basis_used.vectors = oracles::random_orthonormal(
        30, 3, *[] { static auto rng = make_rng(645); return &rng; }());
    det.kmeans = kmeans_rows(det.basis_used.vectors, 3, km);
    det.partition = det.kmeans.partition;
    const TheoryReport rep = corollary1_report(inst.graph, f, inst.sketch, sol, det, 0.0);
    CHECK_FALSE(rep.conditions_met[3]);
    CHECK(std::isnan(rep.rhs_bound));
}

TEST_CASE("error rate") {
    SUBCASE("identical partitions") {
        Partition p{{0, 1, 0, 1}, 2};
        CHECK(error_rate(p, p) == doctest::Approx(0.0));
    }
    SUBCASE("label swaps cost nothing") {
        Partition truth{{0, 0, 1, 1}, 2};
        Partition swapped{{1, 1, 0, 0}, 2};
        CHECK(error_rate(swapped, truth) == doctest::Approx(0.0));
    }
    SUBCASE("hand-enumerated example") {
        Partition truth{{0, 0, 0, 1, 1, 1}, 2};
        Partition detected{{1, 1, 0, 0, 0, 1}, 2};
        CHECK(error_rate(detected, truth) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("simultaneous relabeling leaves the rate unchanged") {
        auto rng = make_rng(647);
        std::uniform_int_distribution<int> lab(0, 2);
        Partition a, b;
        a.k = b.k = 3;
        for (int i = 0; i < 30; ++i) {
            a.assignment.push_back(i < 3 ? i : lab(rng));
            b.assignment.push_back(i < 3 ? i : lab(rng));
        }
        const double base = error_rate(a, b);
        Partition a2 = a, b2 = b;
        for (int& c : a2.assignment) c = (c + 1) % 3;
        for (int& c : b2.assignment) c = (c + 1) % 3;
        CHECK(error_rate(a2, b2) == doctest::Approx(base).epsilon(1e-12));
        CHECK((base == 0.0) == (error_rate(b, a) == 0.0));
    }
    SUBCASE("factorial guard") {
        Partition big;
        big.k = 9;
        big.assignment.resize(9);
        for (int i = 0; i < 9; ++i) big.assignment[i] = i;
        CHECK_THROWS_AS(error_rate(big, big), std::invalid_argument);
    }
}

TEST_CASE("frobenius-vs-spectral projector inequality holds for random pairs") {
    auto rng = make_rng(653);
    for (int t = 0; t < 100; ++t) {
        const int k = 2 + t % 4;
        const Eigen::MatrixXd a = oracles::random_orthonormal(25, k, rng);
        const Eigen::MatrixXd b = oracles::random_orthonormal(25, k, rng);
        const Eigen::MatrixXd diff = a * a.transpose() - b * b.transpose();
        const double fro2 = diff.squaredNorm();
        const double spec = spectral_norm(diff);
        CHECK(fro2 <= 2.0 * k * spec * spec + 1e-9);
    }
}

TEST_CASE("perturbed top-k subspaces obey the gap inequality") {
    int checked = 0;
    for (std::uint64_t seed = 901; seed <= 930; ++seed) {
        const Instance inst = random_instance(seed, 30, 3, 6, 6);
        const Eigen::MatrixXd c_bar = true_covariance(inst.eig, inst.filter, inst.sketch);
        const SignalBatch batch = gen_signals(inst.eig, inst.filter, inst.sketch, 30000, 1e-3,
                                              LatentDist::uniform_pm1, seed * 13);
        const Eigen::MatrixXd c_hat = sample_covariance(batch);
        const double pert = spectral_norm(c_hat - c_bar);
        const Eigen::VectorXd levels = singular_values(c_bar);
        const double delta = levels(2) - levels(3) - pert;
        if (delta <= 0.0) continue;
        const TopKBasis top_bar = top_k_eigvecs_sym(c_bar, 3, EigOrder::descending);
        const TopKBasis top_hat = top_k_eigvecs_sym(c_hat, 3, EigOrder::descending);
        CHECK(projector_distance(top_bar.vectors, top_hat.vectors) <= pert / delta + 1e-9);
        ++checked;
    }
    CHECK(checked >= 15);
}
