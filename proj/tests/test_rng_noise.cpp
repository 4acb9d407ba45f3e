#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "brar/gof.hpp"
#include "brar/math.hpp"
#include "brar/noise.hpp"
#include "brar/quadrature.hpp"
#include "brar/rng.hpp"
#include "oracles.hpp"

using namespace brar;

TEST_CASE("rng streams are reproducible and separated") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
    }
    CHECK(a.next_u64() != c.next_u64());
    CHECK(derive_stream(7, 0, 0) != derive_stream(7, 1, 0));
    CHECK(derive_stream(7, 0, 0) != derive_stream(7, 0, 1));
    CHECK(derive_stream(7, 0, 0) == derive_stream(7, 0, 0));
}

TEST_CASE("uniform draws live in [0,1)") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("density point values") {
    CHECK(NoiseSpec::normal(0, 1).density(0.0) ==
          Catch::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(NoiseSpec::laplace(1).density(0.0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(NoiseSpec::cauchy(1).density(0.0) == Catch::Approx(1.0 / pi).epsilon(1e-14));
    CHECK(NoiseSpec::uniform(2).density(1.0) == Catch::Approx(0.25));
    CHECK(NoiseSpec::uniform(2).density(3.0) == 0.0);
    // student(1) coincides with cauchy(1)
    CHECK(NoiseSpec::student(1).density(0.7) ==
          Catch::Approx(NoiseSpec::cauchy(1).density(0.7)).epsilon(1e-12));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(NoiseSpec::normal(0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::normal(0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::student(0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::uniform(-2.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::laplace(0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::cauchy(-0.5), std::invalid_argument);
}

TEST_CASE("densities integrate to one") {
    const std::vector<NoiseSpec> catalogue = {
        NoiseSpec::normal(0, 1),   NoiseSpec::normal(0.5, 2.0),
        NoiseSpec::student(1),     NoiseSpec::student(5),
        NoiseSpec::uniform(2),     NoiseSpec::laplace(1.5),
        NoiseSpec::cauchy(1)};
    for (const auto& spec : catalogue) {
        INFO(spec.label());
        // heavy tails converge slowly, integrate far out explicitly
        const double mass =
            integrate([&spec](double x) { return spec.density(x); }, -2000.0,
                      2000.0, 1e-9);
        CHECK(mass == Catch::Approx(1.0).margin(2e-3));
    }
    // light-tailed families to full tolerance over the detected envelope
    CHECK(integrate_real_line([](double x) {
              return NoiseSpec::normal(0, 1).density(x);
          }) == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(integrate_real_line([](double x) {
              return NoiseSpec::laplace(1).density(x);
          }) == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("cdf is monotone with limits zero and one") {
    const std::vector<NoiseSpec> catalogue = {
        NoiseSpec::normal(0, 1), NoiseSpec::student(2), NoiseSpec::uniform(1),
        NoiseSpec::laplace(1), NoiseSpec::cauchy(1)};
    for (const auto& spec : catalogue) {
        INFO(spec.label());
        double prev = 0.0;
        for (double x = -50.0; x <= 50.0; x += 0.25) {
            const double c = spec.cdf(x);
            CHECK(c >= prev - 1e-15);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
        CHECK(spec.cdf(-1e8) == Catch::Approx(0.0).margin(1e-6));
        CHECK(spec.cdf(1e8) == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("cdf matches the integrated density") {
    const std::vector<NoiseSpec> catalogue = {NoiseSpec::normal(0.3, 1.7),
                                              NoiseSpec::student(5),
                                              NoiseSpec::laplace(2)};
    for (const auto& spec : catalogue) {
        INFO(spec.label());
        for (double x : {-1.5, 0.0, 0.8, 2.5}) {
            const double mass = oracles::simpson(
                [&spec](double t) { return spec.density(t); }, -60.0, x, 40000);
            CHECK(spec.cdf(x) == Catch::Approx(mass).margin(1e-7));
        }
    }
}

TEST_CASE("samplers are seed-deterministic") {
    const auto spec = NoiseSpec::student(5);
    Rng a(99), b(99);
    for (int i = 0; i < 1000; ++i) CHECK(spec.sample(a) == spec.sample(b));
}

TEST_CASE("samplers match their cdf at desk scale") {
    const std::vector<NoiseSpec> catalogue = {
        NoiseSpec::normal(0, 1), NoiseSpec::normal(-1, 0.5),
        NoiseSpec::student(1),   NoiseSpec::student(5),
        NoiseSpec::uniform(2),   NoiseSpec::laplace(1),
        NoiseSpec::cauchy(1)};
    int family_index = 0;
    for (const auto& spec : catalogue) {
        INFO(spec.label());
        Rng rng(1234 + family_index++);
        std::vector<double> sample(4000);
        for (auto& x : sample) x = spec.sample(rng);
        const auto ks = ks_test(sample, spec);
        CHECK(ks.p_value > 1e-4);
    }
}

TEST_CASE("second moments") {
    CHECK(NoiseSpec::normal(0, 2.5).variance() == 2.5);
    CHECK(NoiseSpec::uniform(2).variance() == Catch::Approx(4.0 / 3.0));
    CHECK(NoiseSpec::laplace(1).variance() == Catch::Approx(2.0));
    CHECK(NoiseSpec::student(5).variance() == Catch::Approx(5.0 / 3.0));
    CHECK_FALSE(NoiseSpec::student(2).finite_variance());
    CHECK_FALSE(NoiseSpec::cauchy(1).finite_variance());
    CHECK(NoiseSpec::normal(0, 1).finite_variance());
}

TEST_CASE("labels round-trip through parse") {
    const std::vector<NoiseSpec> catalogue = {
        NoiseSpec::normal(0.25, 1.5), NoiseSpec::student(5),
        NoiseSpec::uniform(2),        NoiseSpec::laplace(1.5),
        NoiseSpec::cauchy(2)};
    for (const auto& spec : catalogue)
        CHECK(NoiseSpec::parse(spec.label()) == spec);
    CHECK_THROWS_AS(NoiseSpec::parse("weibull:1"), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::parse("normal:1"), std::invalid_argument);
}
