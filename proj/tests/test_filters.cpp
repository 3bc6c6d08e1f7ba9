#include "blindcd/filters.hpp"
#include "blindcd/graph.hpp"
#include "blindcd/rng.hpp"
#include "blindcd/serialization.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace blindcd;

namespace {

LaplacianEig synthetic_eig(std::initializer_list<double> values) {
    LaplacianEig eig;
    eig.eigenvalues = Eigen::VectorXd(values.size());
    int i = 0;
    for (double v : values) eig.eigenvalues(i++) = v;
    eig.eigenvectors = Eigen::MatrixXd::Identity(values.size(), values.size());
    return eig;
}

std::pair<Graph, LaplacianEig> sbm_with_eig(std::uint64_t seed, int n = 60) {
    const double logn = std::log(static_cast<double>(n));
    const double a = std::min(0.8, 8.0 * logn / n);
    const double b = std::min(0.2, logn / n);
    auto [g, truth] = sbm_generate({n, 3, a, b, seed});
    LaplacianEig eig = eig_laplacian(g);
    return {std::move(g), std::move(eig)};
}

} // namespace

TEST_CASE("constant polynomial is the identity response") {
    const LaplacianEig eig = synthetic_eig({0.0, 1.0, 3.0});
    const FrequencyResponse h = freq_response(PolynomialFilter{{1.0}}, eig);
    CHECK((h.values - Eigen::VectorXd::Ones(3)).norm() == 0.0);
}

TEST_CASE("diffusion response is one at the zero eigenvalue") {
    const LaplacianEig eig = synthetic_eig({0.0, 0.5, 1.0});
    const FrequencyResponse h = freq_response(DiffusionFilter{0.5, 7}, eig);
    CHECK(h.values(0) == doctest::Approx(1.0));
}

TEST_CASE("single-pole IIR closed form on a synthetic spectrum") {
    const LaplacianEig eig = synthetic_eig({0.0, 1.0, 3.0});
    const FrequencyResponse h = freq_response(SinglePoleIirFilter{1.0}, eig);
    CHECK(h.values(0) == doctest::Approx(1.0));
    CHECK(h.values(1) == doctest::Approx(0.5));
    CHECK(h.values(2) == doctest::Approx(0.25));
}

TEST_CASE("diffusion alpha admissibility is checked against the spectrum") {
    auto [g, eig] = sbm_with_eig(3);
    const double lmax = eig.eigenvalues(eig.eigenvalues.size() - 1);
    CHECK_THROWS_AS(freq_response(DiffusionFilter{1.5 / lmax, 4}, eig), std::invalid_argument);
    CHECK_NOTHROW(freq_response(DiffusionFilter{0.5 / lmax, 4}, eig));
    CHECK_THROWS_AS(freq_response(DiffusionFilter{0.5 / lmax, 0}, eig), std::invalid_argument);
}

TEST_CASE("applying the identity filter returns the input") {
    auto [g, eig] = sbm_with_eig(5);
    auto rng = make_rng(5, 1);
    const Eigen::MatrixXd x = oracles::random_gaussian(g.n(), 3, rng);
    const Eigen::MatrixXd y = apply_filter(PolynomialFilter{{1.0}}, eig, x);
    CHECK((y - x).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("ideal low-pass fixes its own range") {
    auto [g, eig] = sbm_with_eig(7);
    auto rng = make_rng(7, 1);
    const int k = 3;
    const Eigen::MatrixXd z = oracles::random_gaussian(k, 4, rng);
    const Eigen::MatrixXd x = eig.eigenvectors.leftCols(k) * z;
    const Eigen::MatrixXd y = apply_filter(IdealLowPassFilter{k}, eig, x);
    CHECK((y - x).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("diffusion filter agrees with the explicit matrix power") {
    const double logn = std::log(20.0);
    auto [g, truth] = sbm_generate({20, 2, 0.7, 0.1, 11});
    const LaplacianEig eig = eig_laplacian(g);
    const double alpha = 0.8 / eig.eigenvalues(19);
    const int t_d = 5;
    auto rng = make_rng(11, 1);
    const Eigen::MatrixXd x = oracles::random_gaussian(20, 2, rng);

    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(20, 20);
    const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(20, 20) - alpha * laplacian(g);
    for (int t = 0; t < t_d - 1; ++t) power = step * power;

    const Eigen::MatrixXd y = apply_filter(DiffusionFilter{alpha, t_d}, eig, x);
    CHECK((y - power * x).norm() <= 1e-8 * (power * x).norm());
    (void)logn;
}

TEST_CASE("polynomial Horner path agrees with the spectral path") {
    auto [g, eig] = sbm_with_eig(13, 24);
    const PolynomialFilter poly{{0.4, -0.03, 0.002, -1e-4}};
    auto rng = make_rng(13, 1);
    const Eigen::MatrixXd x = oracles::random_gaussian(24, 3, rng);
    const Eigen::MatrixXd spectral = apply_filter(poly, eig, x);
    const Eigen::MatrixXd horner = apply_filter_horner(poly, laplacian(g), x);
    CHECK((spectral - horner).norm() <= 1e-8 * spectral.norm());
}

TEST_CASE("filter application scales eigenvectors by the response") {
    auto [g, eig] = sbm_with_eig(17, 18);
    const FilterSpec f = SinglePoleIirFilter{2.0};
    const FrequencyResponse h = freq_response(f, eig);
    for (int i = 0; i < 18; ++i) {
        const Eigen::MatrixXd v = eig.eigenvectors.col(i);
        const Eigen::MatrixXd fv = apply_filter(f, eig, v);
        CHECK((fv - h.values(i) * v).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("low-pass coefficient basics") {
    SUBCASE("ideal low-pass is exactly zero") {
        const LaplacianEig eig = synthetic_eig({0.0, 1.0, 2.0, 5.0});
        const FrequencyResponse h = freq_response(IdealLowPassFilter{2}, eig);
        CHECK(lowpass_coefficient(h, 2) == doctest::Approx(0.0));
    }
    SUBCASE("all-ones response gives one") {
        FrequencyResponse h{Eigen::VectorXd::Ones(5)};
        CHECK(lowpass_coefficient(h, 2) == doctest::Approx(1.0));
    }
    SUBCASE("vanishing head response is flagged") {
        FrequencyResponse h{Eigen::VectorXd::Zero(4)};
        CHECK_THROWS_WITH_AS(lowpass_coefficient(h, 2), doctest::Contains("not low-pass"),
                             std::domain_error);
    }
}

TEST_CASE("closed-form eta matches the definition on random graphs") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        auto [g, eig] = sbm_with_eig(seed);
        const int k = 3;
        const double lmax = eig.eigenvalues(eig.eigenvalues.size() - 1);

        const FilterSpec diffusion = DiffusionFilter{0.6 / lmax, 9};
        CHECK(eta_closed_form(diffusion, eig, k) ==
              doctest::Approx(lowpass_coefficient(freq_response(diffusion, eig), k)).epsilon(1e-10));

        const FilterSpec iir = SinglePoleIirFilter{1.7};
        CHECK(eta_closed_form(iir, eig, k) ==
              doctest::Approx(lowpass_coefficient(freq_response(iir, eig), k)).epsilon(1e-10));

        const FilterSpec boosted = boost_filter(iir, eig);
        CHECK(eta_closed_form(boosted, eig, k) ==
              doctest::Approx(lowpass_coefficient(freq_response(boosted, eig), k)).epsilon(1e-10));
    }
}

TEST_CASE("closed-form eta in degenerate geometries") {
    SUBCASE("zero gap forces eta one") {
        const LaplacianEig eig = synthetic_eig({0.0, 2.0, 2.0, 7.0});
        CHECK(eta_closed_form(DiffusionFilter{0.1, 6}, eig, 2) == doctest::Approx(1.0));
        CHECK(eta_closed_form(SinglePoleIirFilter{1.0}, eig, 2) == doctest::Approx(1.0));
    }
    SUBCASE("boosted eta vanishes when the tail starts at the top eigenvalue") {
        const LaplacianEig eig = synthetic_eig({0.0, 1.0, 6.0});
        CHECK(eta_closed_form(BoostedIirFilter{1.0, 6.0}, eig, 2) == doctest::Approx(0.0));
    }
    SUBCASE("unsupported variant") {
        const LaplacianEig eig = synthetic_eig({0.0, 1.0, 2.0});
        CHECK_THROWS_AS(eta_closed_form(PolynomialFilter{{1.0}}, eig, 1), std::invalid_argument);
    }
}

TEST_CASE("eta of the diffusion family is nonincreasing in the filter order") {
    auto [g, eig] = sbm_with_eig(23);
    const double alpha = 0.7 / eig.eigenvalues(eig.eigenvalues.size() - 1);
    double prev = std::numeric_limits<double>::infinity();
    for (int t_d = 2; t_d <= 64; ++t_d) {
        const double eta = eta_closed_form(DiffusionFilter{alpha, t_d}, eig, 3);
        CHECK(eta <= prev + 1e-15);
        prev = eta;
    }
}

TEST_CASE("curvature bounds") {
    SUBCASE("zero gap collapses both bounds to one") {
        const EtaBounds b = observation1_bounds(0.5, 0.0, 0.1, 0.2, -0.3);
        CHECK(b.lower == doctest::Approx(1.0));
        CHECK(b.upper == doctest::Approx(1.0));
    }
    SUBCASE("matching curvature bounds coincide") {
        const EtaBounds b = observation1_bounds(0.8, 0.5, 0.3, 0.3, -0.2);
        CHECK(b.lower == doctest::Approx(b.upper));
    }
    SUBCASE("exact second-derivative range encloses the true eta of the IIR filter") {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            auto [g, eig] = sbm_with_eig(seed, 30);
            const double c = 1.3;
            const int k = 3;
            const double lk = eig.eigenvalues(k - 1);
            const double lk1 = eig.eigenvalues(k);
            auto h = [c](double l) { return 1.0 / (1.0 + l / c); };
            auto hpp = [c](double l) { return 2.0 / (c * c) * std::pow(1.0 + l / c, -3.0); };
            const double hp_k1 = -(1.0 / c) * std::pow(1.0 + lk1 / c, -2.0);
            // h'' is decreasing, so the curvature range over [lk, lk1] is
            // [h''(lk1), h''(lk)]
            const EtaBounds b = observation1_bounds(h(lk), lk1 - lk, hpp(lk1), hpp(lk), hp_k1);
            const double eta = eta_closed_form(SinglePoleIirFilter{c}, eig, k);
            CHECK(eta <= b.upper + 1e-12);
            CHECK(eta >= b.lower - 1e-12);
        }
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(observation1_bounds(0.5, 1.0, 0.4, 0.2, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(observation1_bounds(0.0, 1.0, 0.1, 0.2, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(observation1_bounds(0.5, -1.0, 0.1, 0.2, -0.1), std::invalid_argument);
    }
}

TEST_CASE("boosting") {
    auto [g, eig] = sbm_with_eig(29);
    const int n = static_cast<int>(eig.eigenvalues.size());
    SUBCASE("IIR boosts to the shifted family") {
        const FilterSpec boosted = boost_filter(SinglePoleIirFilter{2.0}, eig);
        const auto* b = std::get_if<BoostedIirFilter>(&boosted);
        REQUIRE(b != nullptr);
        CHECK(b->c == doctest::Approx(2.0));
        CHECK(b->lambda_n == doctest::Approx(eig.eigenvalues(n - 1)));
        const FrequencyResponse h = freq_response(boosted, eig);
        CHECK(std::abs(h.values(n - 1)) <= 1e-12);
    }
    SUBCASE("ideal low-pass is unchanged") {
        const FilterSpec boosted = boost_filter(IdealLowPassFilter{3}, eig);
        CHECK(std::holds_alternative<IdealLowPassFilter>(boosted));
    }
    SUBCASE("boosted responses vanish at the top eigenvalue") {
        for (const FilterSpec f :
             {FilterSpec{DiffusionFilter{0.0, 6}}, FilterSpec{SinglePoleIirFilter{0.7}},
              FilterSpec{PolynomialFilter{{1.0, -0.02}}}}) {
            const FilterSpec boosted = boost_filter(f, eig);
            const FrequencyResponse h = freq_response(boosted, eig);
            CHECK(std::abs(h.values(n - 1)) <= 1e-12);
        }
    }
    SUBCASE("responses that rise along the spectrum are rejected") {
        CHECK_THROWS_AS(boost_filter(PolynomialFilter{{0.0, 1.0}}, eig), std::invalid_argument);
    }
    SUBCASE("boosting never increases the low-pass coefficient") {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            auto [g2, eig2] = sbm_with_eig(seed, 45);
            for (const FilterSpec f :
                 {FilterSpec{DiffusionFilter{0.0, 4}}, FilterSpec{DiffusionFilter{0.0, 16}},
                  FilterSpec{SinglePoleIirFilter{0.5}}, FilterSpec{SinglePoleIirFilter{5.0}}}) {
                const double before = lowpass_coefficient(freq_response(f, eig2), 3);
                const FilterSpec boosted = boost_filter(f, eig2);
                const double after = lowpass_coefficient(freq_response(boosted, eig2), 3);
                CHECK(after <= before + 1e-12);
            }
        }
    }
}

TEST_CASE("filter specs round trip through json") {
    const std::vector<FilterSpec> specs = {
        PolynomialFilter{{1.0, -0.5, 0.25}}, DiffusionFilter{0.01, 16}, DiffusionFilter{0.0, 4},
        SinglePoleIirFilter{3.0}, IdealLowPassFilter{2}};
    for (const FilterSpec& f : specs) {
        const FilterSpec back = filter_from_json(filter_to_json(f));
        CHECK(filter_to_json(back) == filter_to_json(f));
    }
    CHECK_THROWS_AS(filter_from_json(json{{"variant", "diffusion"}, {"t_d", 4}, {"typo", 1}}),
                    std::invalid_argument);
}
