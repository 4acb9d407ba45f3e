#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "brar/serialize.hpp"

using namespace brar;

TEST_CASE("test report round-trips exactly through json") {
    TestReport report;
    report.br.kind = BrReport::StatKind::t_tilde;
    report.br.value = 1.234567890123456789;
    report.br.mu = 2.0 / std::sqrt(pi);
    report.br.tau2 = 4.0 / std::sqrt(2 * pi);
    report.br.z = -0.12345678901234567;
    report.br.n = 100;
    report.br.h = 0.048579821874;
    report.p_value = 0.54321;
    report.reject = false;
    report.baseline_ks = KsResult{0.0678, 0.754};

    const std::string text = to_json(report).dump(2);
    const auto parsed = test_report_from_json(json::parse(text));
    CHECK(parsed.br.value == report.br.value);
    CHECK(parsed.br.mu == report.br.mu);
    CHECK(parsed.br.tau2 == report.br.tau2);
    CHECK(parsed.br.z == report.br.z);
    CHECK(parsed.br.n == report.br.n);
    CHECK(parsed.br.h == report.br.h);
    CHECK(parsed.p_value == report.p_value);
    CHECK(parsed.reject == report.reject);
    REQUIRE(parsed.baseline_ks.has_value());
    CHECK(parsed.baseline_ks->d == report.baseline_ks->d);
    CHECK(parsed.baseline_ks->p_value == report.baseline_ks->p_value);

    // serialization is deterministic
    CHECK(to_json(parsed).dump(2) == text);
}

TEST_CASE("mc report round-trips with z values") {
    McReport report;
    report.rejection_rate = 0.051;
    report.mc_stderr = std::sqrt(0.051 * 0.949 / 1000.0);
    report.reps_used = 1000;
    report.retries = 3;
    report.ks_rejection_rate = 0.047;
    report.z_values = {0.1, -2.3456789012345678, 1e-17, 12345.6789};

    const std::string text = to_json(report, /*include_z=*/true).dump();
    const auto parsed = mc_report_from_json(json::parse(text));
    CHECK(parsed.rejection_rate == report.rejection_rate);
    CHECK(parsed.mc_stderr == report.mc_stderr);
    CHECK(parsed.reps_used == report.reps_used);
    CHECK(parsed.retries == report.retries);
    CHECK(parsed.z_values == report.z_values);
    REQUIRE(parsed.ks_rejection_rate.has_value());
    CHECK(*parsed.ks_rejection_rate == *report.ks_rejection_rate);
}

TEST_CASE("rate report round-trips") {
    RateReport report;
    report.quantity = "sum-xt-pos-unit";
    report.model_label = "purely-unstable";
    report.n_grid = {256, 512, 1024};
    report.medians = {12.5, 35.1, 99.875};
    report.slope = 1.497;
    report.theoretical = 1.5;
    report.tolerance = 0.15;
    report.pass = true;

    const auto parsed = rate_report_from_json(json::parse(to_json(report).dump()));
    CHECK(parsed.quantity == report.quantity);
    CHECK(parsed.n_grid == report.n_grid);
    CHECK(parsed.medians == report.medians);
    CHECK(parsed.slope == report.slope);
    CHECK(parsed.pass == report.pass);
}

TEST_CASE("unknown fields are rejected") {
    const json doc = {{"a", 1}, {"b", 2}, {"rogue", 3}};
    CHECK_THROWS_AS(reject_unknown_fields(doc, {"a", "b"}, "test"),
                    std::invalid_argument);
    CHECK_NOTHROW(reject_unknown_fields(doc, {"a", "b", "rogue"}, "test"));
}
