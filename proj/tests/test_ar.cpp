#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "brar/ar.hpp"
#include "oracles.hpp"

using namespace brar;

TEST_CASE("companion matrix layout") {
    SECTION("1x1") {
        const auto c = companion_matrix(ArModel({0.99}));
        REQUIRE(c.rows() == 1);
        CHECK(c(0, 0) == 0.99);
    }
    SECTION("explosive pair") {
        const auto c = companion_matrix(ArModel({0.0, 1.21}));
        REQUIRE(c.rows() == 2);
        CHECK(c(0, 0) == 0.0);
        CHECK(c(0, 1) == 1.21);
        CHECK(c(1, 0) == 1.0);
        CHECK(c(1, 1) == 0.0);
    }
    SECTION("third order") {
        const auto c =
            companion_matrix(ArModel({-1.0 / 12.0, 5.0 / 24.0, 1.0 / 24.0}));
        REQUIRE(c.rows() == 3);
        CHECK(c(0, 0) == -1.0 / 12.0);
        CHECK(c(0, 1) == 5.0 / 24.0);
        CHECK(c(0, 2) == 1.0 / 24.0);
        CHECK(c(1, 0) == 1.0);
        CHECK(c(2, 1) == 1.0);
        CHECK(c(1, 1) == 0.0);
        CHECK(c(2, 0) == 0.0);
        CHECK(c(2, 2) == 0.0);
    }
    CHECK_THROWS_AS(companion_matrix(ArModel{}), std::invalid_argument);
}

TEST_CASE("model construction rejects bad coefficients") {
    CHECK_THROWS_AS(ArModel({0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ArModel({std::nan("")}), std::invalid_argument);
}

TEST_CASE("regime classification") {
    CHECK(classify(ArModel{}) == Regime::neutral);
    CHECK(classify(ArModel({-1.0})) == Regime::purely_unstable);
    CHECK(classify(ArModel({1.0})) == Regime::purely_unstable);
    CHECK(classify(ArModel({0.0, 1.21})) == Regime::purely_explosive);
    CHECK(classify(ArModel({0.0, 0.0, 0.0, 1.0})) == Regime::seasonal_unstable);
    // roots 1.5 and 0.5 of the eigenpolynomial: one inside, one outside
    CHECK(classify(ArModel({2.0, -0.75})) == Regime::mixed);

    const double tol = 1e-8;
    CHECK_THROWS_AS(classify(ArModel({0.5}), -1.0), std::invalid_argument);
    CHECK(classify(ArModel({1.0 - 2e-8}), tol) == Regime::stable);
}

TEST_CASE("section-4 model catalogue classifies as advertised") {
    CHECK(classify(preset_model("m0")) == Regime::neutral);
    CHECK(classify(preset_model("m1")) == Regime::stable);
    CHECK(classify(preset_model("m2")) == Regime::stable);
    CHECK(classify(preset_model("m3")) == Regime::purely_unstable);
    CHECK(classify(preset_model("m4")) == Regime::purely_unstable);
    CHECK(classify(preset_model("m5")) == Regime::purely_explosive);
    CHECK_THROWS_AS(preset_model("m9"), std::invalid_argument);
}

TEST_CASE("explosive eigenvalues are +-1.1") {
    const auto moduli = companion_eigen_moduli(ArModel({0.0, 1.21}));
    REQUIRE(moduli.size() == 2);
    CHECK(moduli[0] == Catch::Approx(1.1).epsilon(1e-10));
    CHECK(moduli[1] == Catch::Approx(1.1).epsilon(1e-10));
}

TEST_CASE("characteristic polynomial roots") {
    SECTION("single positive unit root") {
        const auto roots = char_poly_roots(ArModel({1.0}));
        REQUIRE(roots.size() == 1);
        CHECK(std::abs(roots[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
    }
    SECTION("theta = 0.5 has root z = 2") {
        const auto roots = char_poly_roots(ArModel({0.5}));
        REQUIRE(roots.size() == 1);
        CHECK(std::abs(roots[0] - std::complex<double>(2.0, 0.0)) < 1e-12);
    }
    SECTION("seasonal of order four gives fourth roots of unity") {
        const auto roots = char_poly_roots(ArModel({0.0, 0.0, 0.0, 1.0}));
        REQUIRE(roots.size() == 4);
        for (const auto& r : roots) CHECK(std::abs(std::abs(r) - 1.0) < 1e-10);
        // sorted by real part: -1, +-i, 1
        CHECK(std::abs(roots.front() - std::complex<double>(-1.0, 0.0)) < 1e-10);
        CHECK(std::abs(roots.back() - std::complex<double>(1.0, 0.0)) < 1e-10);
    }
    CHECK_THROWS_AS(char_poly_roots(ArModel{}), std::invalid_argument);
}

TEST_CASE("polynomial roots are reciprocal companion eigenvalues") {
    // random coefficient sets with theta_p away from zero
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const int p = 1 + static_cast<int>(rng.next_u64() % 5);
        std::vector<double> theta(p);
        for (auto& c : theta) c = 2.0 * rng.uniform() - 1.0;
        if (std::fabs(theta.back()) < 0.1) theta.back() = 0.5;
        const ArModel model(theta);

        auto moduli = companion_eigen_moduli(model);
        std::vector<double> reciprocal;
        for (const auto& z : char_poly_roots(model))
            reciprocal.push_back(1.0 / std::abs(z));
        std::sort(reciprocal.begin(), reciprocal.end(), std::greater<double>());
        REQUIRE(reciprocal.size() == moduli.size());
        for (std::size_t i = 0; i < moduli.size(); ++i)
            CHECK(reciprocal[i] == Catch::Approx(moduli[i]).margin(1e-8));
    }
}

TEST_CASE("noiseless recursions") {
    SECTION("unit root with zero noise stays at zero") {
        const auto ts = simulate(ArModel({1.0}), NoiseSpec::degenerate(), 50, 7u);
        for (int t = 1; t <= 50; ++t) CHECK(ts.at(t) == 0.0);
    }
    SECTION("geometric decay from x0 = 1") {
        std::vector<double> phi0 = {1.0};
        const auto ts =
            simulate(ArModel({0.5}), NoiseSpec::degenerate(), 20, phi0, 7u);
        for (int t = 1; t <= 20; ++t)
            CHECK(ts.at(t) == Catch::Approx(std::pow(2.0, -t)).epsilon(1e-14));
    }
}

TEST_CASE("simulation is deterministic in the seed") {
    const ArModel model({0.5, 0.2});
    const auto noise = NoiseSpec::normal(0, 1);
    const auto a = simulate(model, noise, 200, 99u);
    const auto b = simulate(model, noise, 200, 99u);
    const auto c = simulate(model, noise, 200, 100u);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.values.size() == 202);
}

TEST_CASE("explosive trajectories overflow with the offending index") {
    try {
        simulate(ArModel({2.0}), NoiseSpec::normal(0, 1), 1200, 3u);
        FAIL("expected overflow");
    } catch (const SimulationOverflow& e) {
        CHECK(e.index > 900);
        CHECK(e.index <= 1200);
    }
}

TEST_CASE("simulation input validation") {
    CHECK_THROWS_AS(simulate(ArModel({0.5}), NoiseSpec::normal(0, 1), 0, 1u),
                    std::invalid_argument);
    std::vector<double> wrong = {1.0, 2.0};
    CHECK_THROWS_AS(simulate(ArModel({0.5}), NoiseSpec::normal(0, 1), 10, wrong, 1u),
                    std::invalid_argument);
    // infinite-variance noise cannot drive a fitted model
    CHECK_THROWS_AS(simulate(ArModel({0.5}), NoiseSpec::cauchy(1), 10, 1u),
                    std::invalid_argument);
    // but is fine for the neutral model
    CHECK_NOTHROW(simulate(ArModel{}, NoiseSpec::cauchy(1), 10, 1u));
}

TEST_CASE("stable variance stabilizes over long runs") {
    const auto ts = simulate(preset_model("m2"), NoiseSpec::normal(0, 1), 100000, 5u);
    auto window_var = [&](int lo, int hi) {
        double mean = 0.0;
        for (int t = lo; t < hi; ++t) mean += ts.at(t);
        mean /= (hi - lo);
        double acc = 0.0;
        for (int t = lo; t < hi; ++t) acc += (ts.at(t) - mean) * (ts.at(t) - mean);
        return acc / (hi - lo);
    };
    // theoretical stationary variance 1/(1-0.99^2) ~ 50.25; windows after
    // burn-in should agree within Monte Carlo noise
    const double v1 = window_var(20000, 60000);
    const double v2 = window_var(60000, 100000);
    CHECK(std::fabs(v1 - v2) / std::max(v1, v2) < 0.5);
    CHECK(v1 > 10.0);
    CHECK(v1 < 250.0);
}
