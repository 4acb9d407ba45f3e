#pragma once

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "brar/ar.hpp"
#include "brar/estimation.hpp"
#include "brar/gof.hpp"
#include "brar/montecarlo.hpp"

// JSON codecs for the report types emitted by the CLI. nlohmann::json keeps
// object keys sorted and prints doubles in shortest round-trip form, so a
// document parses back to bit-identical values and identical invocations
// yield byte-identical files.

namespace brar {

using json = nlohmann::json;

inline void reject_unknown_fields(const json& doc,
                                  const std::set<std::string>& allowed,
                                  const std::string& context) {
    for (const auto& item : doc.items())
        if (!allowed.count(item.key()))
            throw std::invalid_argument(context + ": unknown field '" + item.key() +
                                        "'");
}

inline json to_json(const TimeSeries& ts) {
    return json{{"p", ts.p}, {"n", ts.n}, {"values", ts.values}};
}

inline json to_json(const OlsFit& fit) {
    std::vector<std::vector<double>> gram(static_cast<std::size_t>(fit.gram.rows()));
    for (Eigen::Index i = 0; i < fit.gram.rows(); ++i)
        for (Eigen::Index j = 0; j < fit.gram.cols(); ++j)
            gram[static_cast<std::size_t>(i)].push_back(fit.gram(i, j));
    return json{{"theta_hat", fit.theta_hat},
                {"gram", gram},
                {"condition_estimate", fit.condition_estimate}};
}

inline json to_json(const BrReport& br) {
    return json{{"statistic_kind", stat_kind_name(br.kind)},
                {"value", br.value},
                {"mu", br.mu},
                {"tau2", br.tau2},
                {"z", br.z},
                {"n", br.n},
                {"h", br.h}};
}

inline BrReport br_report_from_json(const json& doc) {
    BrReport br;
    br.kind = doc.at("statistic_kind").get<std::string>() == "t_hat"
                  ? BrReport::StatKind::t_hat
                  : BrReport::StatKind::t_tilde;
    br.value = doc.at("value").get<double>();
    br.mu = doc.at("mu").get<double>();
    br.tau2 = doc.at("tau2").get<double>();
    br.z = doc.at("z").get<double>();
    br.n = doc.at("n").get<long>();
    br.h = doc.at("h").get<double>();
    return br;
}

inline json to_json(const KsResult& ks) {
    return json{{"d", ks.d}, {"p", ks.p_value}};
}

inline json to_json(const TestReport& report) {
    json doc{{"br", to_json(report.br)},
             {"reject", report.reject},
             {"p_value", report.p_value}};
    if (report.baseline_ks) doc["baseline_ks"] = to_json(*report.baseline_ks);
    return doc;
}

inline TestReport test_report_from_json(const json& doc) {
    TestReport report;
    report.br = br_report_from_json(doc.at("br"));
    report.reject = doc.at("reject").get<bool>();
    report.p_value = doc.at("p_value").get<double>();
    if (doc.contains("baseline_ks")) {
        KsResult ks;
        ks.d = doc.at("baseline_ks").at("d").get<double>();
        ks.p_value = doc.at("baseline_ks").at("p").get<double>();
        report.baseline_ks = ks;
    }
    return report;
}

inline json to_json(const McReport& report, bool include_z = false) {
    json doc{{"rejection_rate", report.rejection_rate},
             {"mc_stderr", report.mc_stderr},
             {"reps_used", report.reps_used},
             {"retries", report.retries}};
    if (report.ks_rejection_rate) doc["ks_rejection_rate"] = *report.ks_rejection_rate;
    if (include_z) doc["z_values"] = report.z_values;
    return doc;
}

inline McReport mc_report_from_json(const json& doc) {
    McReport report;
    report.rejection_rate = doc.at("rejection_rate").get<double>();
    report.mc_stderr = doc.at("mc_stderr").get<double>();
    report.reps_used = doc.at("reps_used").get<long>();
    report.retries = doc.at("retries").get<long>();
    if (doc.contains("ks_rejection_rate"))
        report.ks_rejection_rate = doc.at("ks_rejection_rate").get<double>();
    if (doc.contains("z_values"))
        report.z_values = doc.at("z_values").get<std::vector<double>>();
    return report;
}

inline json to_json(const CalibrationResult& result) {
    return json{{"h0", result.h0}, {"achieved_level", result.achieved_level}};
}

inline json to_json(const RateReport& report) {
    return json{{"quantity", report.quantity},
                {"model", report.model_label},
                {"n_grid", report.n_grid},
                {"medians", report.medians},
                {"slope", report.slope},
                {"theoretical", report.theoretical},
                {"tolerance", report.tolerance},
                {"pass", report.pass}};
}

inline RateReport rate_report_from_json(const json& doc) {
    RateReport report;
    report.quantity = doc.at("quantity").get<std::string>();
    report.model_label = doc.at("model").get<std::string>();
    report.n_grid = doc.at("n_grid").get<std::vector<long>>();
    report.medians = doc.at("medians").get<std::vector<double>>();
    report.slope = doc.at("slope").get<double>();
    report.theoretical = doc.at("theoretical").get<double>();
    report.tolerance = doc.at("tolerance").get<double>();
    report.pass = doc.at("pass").get<bool>();
    return report;
}

inline json to_json(const WienerQuantiles& q) {
    return json{{"q90", q.q90}, {"q95", q.q95}, {"q99", q.q99}};
}

inline json to_json(const AsymKernelReport& report) {
    return json{{"kernel", report.kernel_label},
                {"normalization", report.normalization},
                {"n_grid", report.n_grid},
                {"medians", report.medians},
                {"ratios", report.ratios},
                {"q95_largest_n", report.q95_largest_n}};
}

}  // namespace brar
