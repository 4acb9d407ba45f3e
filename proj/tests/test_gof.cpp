#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <vector>

#include "brar/gof.hpp"
#include "brar/math.hpp"
#include "oracles.hpp"

using namespace brar;

TEST_CASE("delta distance") {
    const auto f0 = NoiseSpec::normal(0, 1);
    CHECK(delta_distance(f0, f0, 2.0) == Catch::Approx(0.0).margin(1e-12));

    const auto shifted = NoiseSpec::normal(0.5, 1);
    const double d = delta_distance(shifted, f0, 2.0);
    CHECK(d > 0.0);
    const double oracle = oracles::riemann(
        [&](double x) {
            const double diff = shifted.density(x) - f0.density(x);
            return diff * diff / f0.density(x);
        },
        -2.0, 2.0, 1e-4);
    CHECK(d == Catch::Approx(oracle).epsilon(1e-6));

    // symmetric in the sign of the shift for an even f0
    const auto left = NoiseSpec::normal(-0.5, 1);
    CHECK(delta_distance(left, f0, 2.0) == Catch::Approx(d).epsilon(1e-9));

    CHECK_THROWS_AS(delta_distance(f0, NoiseSpec::uniform(1), 2.0),
                    std::invalid_argument);
}

TEST_CASE("ks statistic on hand-checkable samples") {
    SECTION("single point at the median") {
        const std::vector<double> sample = {0.0};
        const auto result = ks_test(sample, NoiseSpec::normal(0, 1));
        CHECK(result.d == Catch::Approx(0.5));
    }
    SECTION("three points against uniform(0,1), brute-force oracle") {
        const std::vector<double> sample = {0.1, 0.5, 0.9};
        auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
        const auto result = ks_test(sample, cdf);
        double oracle = 0.0;
        const double n = 3.0;
        std::vector<double> sorted = sample;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            oracle = std::max(oracle, cdf(sorted[i]) - static_cast<double>(i) / n);
            oracle = std::max(oracle, static_cast<double>(i + 1) / n - cdf(sorted[i]));
        }
        CHECK(result.d == Catch::Approx(oracle));
        CHECK(result.d == Catch::Approx(0.2333333333333334).epsilon(1e-12));
    }
    SECTION("exact quantile spacing reaches the lower envelope") {
        const int n = 25;
        std::vector<double> sample;
        for (int i = 1; i <= n; ++i)
            sample.push_back(normal_quantile((i - 0.5) / n));
        const auto result = ks_test(sample, NoiseSpec::normal(0, 1));
        CHECK(result.d == Catch::Approx(1.0 / (2.0 * n)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(ks_test({}, NoiseSpec::normal(0, 1)), std::invalid_argument);
}

TEST_CASE("ks p-values under the null are close to uniform") {
    const auto f0 = NoiseSpec::normal(0, 1);
    std::vector<double> p_values;
    for (int rep = 0; rep < 2000; ++rep) {
        Rng rng(derive_stream(808, static_cast<std::uint64_t>(rep)));
        std::vector<double> sample(100);
        for (auto& x : sample) x = f0.sample(rng);
        p_values.push_back(ks_test(sample, f0).p_value);
    }
    const auto meta = ks_test(p_values, [](double u) { return std::clamp(u, 0.0, 1.0); });
    CHECK(meta.d < 0.05);
}

TEST_CASE("decision procedure consistency") {
    const auto f0 = NoiseSpec::normal(0, 1);
    const TestConfig cfg(2.0, 0.05, Kernel::gaussian(), Bandwidth(0.14, 0.23), f0);

    Rng rng(909);
    std::vector<double> res(100);
    for (auto& r : res) r = f0.sample(rng);
    const auto report = br_gof_test(res, cfg);

    CHECK(report.br.mu == Catch::Approx(2.0 / std::sqrt(pi)).epsilon(1e-12));
    CHECK(report.br.tau2 == Catch::Approx(4.0 / std::sqrt(2 * pi)).epsilon(1e-12));
    CHECK(report.br.value >= 0.0);
    CHECK(report.p_value >= 0.0);
    CHECK(report.p_value <= 1.0);
    // three-way consistency
    const double u = normal_quantile(1.0 - cfg.alpha);
    CHECK(report.reject == (report.br.z > u));
    CHECK(report.reject == (report.p_value < cfg.alpha));
    CHECK_FALSE(report.baseline_ks.has_value());

    TestConfig with_ks = cfg;
    with_ks.with_ks_baseline = true;
    const auto report2 = br_gof_test(res, with_ks);
    REQUIRE(report2.baseline_ks.has_value());
    CHECK(report2.baseline_ks->d > 0.0);
}

TEST_CASE("boundary value is not rejected") {
    // strict inequality at z == u_{1-alpha}: exercised through the raw rule
    const double u = normal_quantile(0.95);
    CHECK_FALSE(u > u);
}

TEST_CASE("config validation") {
    const auto f0 = NoiseSpec::normal(0, 1);
    CHECK_THROWS_AS(TestConfig(0.0, 0.05, Kernel::gaussian(), Bandwidth(0.1, 0.2), f0),
                    std::invalid_argument);
    CHECK_THROWS_AS(TestConfig(2.0, 0.0, Kernel::gaussian(), Bandwidth(0.1, 0.2), f0),
                    std::invalid_argument);
    // uniform f0 narrower than delta vanishes inside the window
    CHECK_THROWS_AS(
        TestConfig(2.0, 0.05, Kernel::gaussian(), Bandwidth(0.1, 0.2), NoiseSpec::uniform(1)),
        std::invalid_argument);
}

TEST_CASE("wiener functional quantiles") {
    const auto q = wiener_functional_quantiles(20000, 1024, 42, 2);
    CHECK(q.q90 > 0.0);
    CHECK(q.q90 < q.q95);
    CHECK(q.q95 < q.q99);

    const auto q2 = wiener_functional_quantiles(20000, 1024, 43, 2);
    CHECK(q.q95 == Catch::Approx(q2.q95).epsilon(0.10));

    CHECK_THROWS_AS(wiener_functional_quantiles(100, 1024, 1), std::invalid_argument);
    CHECK_THROWS_AS(wiener_functional_quantiles(20000, 10, 1), std::invalid_argument);
}

TEST_CASE("wiener quantiles are parallelism independent") {
    const auto serial = wiener_functional_quantiles(10000, 1000, 7, 1);
    const auto parallel = wiener_functional_quantiles(10000, 1000, 7, 4);
    CHECK(serial.q90 == parallel.q90);
    CHECK(serial.q95 == parallel.q95);
    CHECK(serial.q99 == parallel.q99);
}

TEST_CASE("random walk variant statistic") {
    const auto f0 = NoiseSpec::normal(0, 1);
    const auto k = Kernel::exponential_one_sided();
    CHECK(rw_variant_statistic(1.5, 1.5, 0.1, f0, 2.0, k) == 0.0);

    // normalization components: sigma0 = 1, F0 = Phi(2) - Phi(-2)
    const double mu = 1.0;
    const double stat = rw_variant_statistic(mu + 1.0, mu, 0.1, f0, 2.0, k);
    const double f_mass = 0.9544997361036416;
    CHECK(stat == Catch::Approx(0.1 / (std::sqrt(f_mass) * -1.0)).epsilon(1e-10));

    CHECK_THROWS_AS(rw_variant_statistic(1.0, 0.5, 0.1, NoiseSpec::cauchy(1), 2.0, k),
                    std::invalid_argument);
    CHECK_THROWS_AS(rw_variant_statistic(1.0, 0.5, 0.1, f0, 2.0, Kernel::gaussian()),
                    std::invalid_argument);
}
