// br-ar: simulate AR(p) processes, fit them by least squares and run the
// integrated-squared-error goodness-of-fit test on the residuals, plus the
// replicated level/power/rate studies. Subcommands write a JSON document to
// stdout (or --out) and optional CSV plot data (--csv). Exit codes: 0 on
// success, 2 on configuration errors, 3 on numerical failures.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brar/montecarlo.hpp"
#include "brar/serialize.hpp"

namespace {

using brar::json;

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<long> parse_longs(const std::string& csv) {
    std::vector<long> out;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stol(item));
    }
    return out;
}

// "lo:hi" -> doubling grid lo, 2lo, ..., hi
std::vector<long> parse_doubling_grid(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("expected --ngrid lo:hi, got '" + text + "'");
    const long lo = std::stol(text.substr(0, colon));
    const long hi = std::stol(text.substr(colon + 1));
    if (lo < 2 || hi < lo) throw ConfigError("bad --ngrid range");
    std::vector<long> grid;
    for (long n = lo; n <= hi; n *= 2) grid.push_back(n);
    return grid;
}

// "lo:hi:count" -> linear grid
std::vector<double> parse_linear_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3 || parts[2] < 2)
        throw ConfigError("expected --grid lo:hi:count with count >= 2");
    const auto count = static_cast<std::size_t>(parts[2]);
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = parts[0] + (parts[1] - parts[0]) * static_cast<double>(i) /
                                 static_cast<double>(count - 1);
    return grid;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open csv file '" + path + "'");
    out << header << '\n';
    for (const auto& row : rows) out << row << '\n';
}

// ---------------------------------------------------------------------------
// Options shared by the experiment subcommands.

struct Options {
    std::string model_alias = "m0";
    std::string theta_csv;
    std::string noise = "";  // defaults to f0
    std::string f0 = "normal:0,1";
    std::string kernel = "gaussian";
    double eps_s = 0.05;
    double h0 = 0.14;
    double kappa = 0.23;
    double delta = 2.0;
    double alpha = 0.05;
    long n = 100;
    long reps = 1000;
    std::uint64_t seed = 0;
    int jobs = 0;  // 0: resolve from BR_AR_JOBS, else 1
    int retry_limit = 8;
    bool with_ks = false;
    bool dump_z = false;
    std::string phi0_csv;
    std::string out;
    std::string csv;

    brar::ArModel model() const {
        if (!theta_csv.empty()) return brar::ArModel(parse_doubles(theta_csv));
        return brar::preset_model(model_alias);
    }
    brar::Kernel make_kernel() const {
        if (kernel == "uniform" || kernel == "smoothed-uniform")
            return brar::Kernel::smoothed_uniform(eps_s);
        return brar::Kernel::parse(kernel);
    }
    brar::NoiseSpec null_density() const { return brar::NoiseSpec::parse(f0); }
    brar::NoiseSpec truth() const {
        return noise.empty() ? null_density() : brar::NoiseSpec::parse(noise);
    }
    brar::TestConfig test_config() const {
        brar::TestConfig cfg(delta, alpha, make_kernel(), brar::Bandwidth(h0, kappa),
                             null_density());
        cfg.with_ks_baseline = with_ks;
        return cfg;
    }
    int resolved_jobs() const {
        if (jobs > 0) return jobs;
        if (const char* env = std::getenv("BR_AR_JOBS")) {
            const int parsed = std::atoi(env);
            if (parsed > 0) return parsed;
        }
        return 1;
    }
    std::vector<double> phi0(int p) const {
        if (phi0_csv.empty()) return std::vector<double>(static_cast<std::size_t>(p), 0.0);
        auto values = parse_doubles(phi0_csv);
        if (static_cast<int>(values.size()) != p)
            throw ConfigError("--phi0 must supply exactly p values");
        return values;
    }
};

void add_model_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--model", opt.model_alias, "model alias m0..m5");
    cmd->add_option("--theta", opt.theta_csv, "explicit coefficients, e.g. 0.5,0.2");
}

void add_test_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--f0", opt.f0, "null density, e.g. normal:0,1");
    cmd->add_option("--kernel", opt.kernel, "gaussian | uniform | exponential");
    cmd->add_option("--eps-s", opt.eps_s, "smoothed-uniform taper width");
    cmd->add_option("--h0", opt.h0, "bandwidth scale");
    cmd->add_option("--kappa", opt.kappa, "bandwidth exponent");
    cmd->add_option("--delta", opt.delta, "weight window half-width");
    cmd->add_option("--alpha", opt.alpha, "test level");
    cmd->add_flag("--ks", opt.with_ks, "also run the Kolmogorov-Smirnov baseline");
}

void add_mc_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--reps", opt.reps, "number of replications");
    cmd->add_option("--jobs", opt.jobs, "worker threads (default BR_AR_JOBS or 1)");
    cmd->add_option("--retry-limit", opt.retry_limit,
                    "retries for overflowing/singular replications");
    cmd->add_flag("--dump-z", opt.dump_z, "include per-replication z values");
}

void add_io_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--out", opt.out, "write the JSON document here instead of stdout");
    cmd->add_option("--csv", opt.csv, "write CSV plot data here");
}

// ---------------------------------------------------------------------------
// Experiment runners (shared between flag parsing and experiment files).

json run_simulate(const Options& opt) {
    const auto model = opt.model();
    const auto phi0 = opt.phi0(model.p);
    const auto ts = brar::simulate(model, opt.truth(), static_cast<int>(opt.n), phi0,
                                   opt.seed);
    std::vector<std::string> rows;
    for (int t = -model.p + 1; t <= ts.n; ++t)
        rows.push_back(std::to_string(t) + "," + format_double(ts.at(t)));
    write_csv(opt.csv, "t,value", rows);
    return json{{"experiment", "simulate"},
                {"model", {{"p", model.p}, {"theta", model.theta}}},
                {"noise", opt.truth().label()},
                {"seed", opt.seed},
                {"series", brar::to_json(ts)}};
}

json run_estimate(const Options& opt) {
    const auto model = opt.model();
    if (model.p < 1) throw ConfigError("estimate: the neutral model has no parameters");
    const auto phi0 = opt.phi0(model.p);
    const auto ts = brar::simulate(model, opt.truth(), static_cast<int>(opt.n), phi0,
                                   opt.seed);
    const auto fit = brar::ols_estimate(ts, model.p);
    const auto eps = brar::residuals(ts, fit.theta_hat);
    std::vector<std::string> rows;
    for (std::size_t t = 0; t < eps.size(); ++t)
        rows.push_back(std::to_string(t + 1) + "," + format_double(eps[t]));
    write_csv(opt.csv, "t,residual", rows);
    return json{{"experiment", "estimate"},
                {"model", {{"p", model.p}, {"theta", model.theta}}},
                {"fit", brar::to_json(fit)},
                {"regime", brar::regime_name(brar::classify(model))},
                {"seed", opt.seed}};
}

json run_test(const Options& opt) {
    const auto model = opt.model();
    const auto phi0 = opt.phi0(model.p);
    const auto ts = brar::simulate(model, opt.truth(), static_cast<int>(opt.n), phi0,
                                   opt.seed);
    std::vector<double> eps;
    if (model.p == 0) {
        eps = brar::residuals(ts, {});
    } else {
        eps = brar::residuals(ts, brar::ols_estimate(ts, model.p).theta_hat);
    }
    const auto report = brar::br_gof_test(eps, opt.test_config());
    json doc = brar::to_json(report);
    doc["experiment"] = "test";
    doc["model"] = {{"p", model.p}, {"theta", model.theta}};
    doc["seed"] = opt.seed;
    return doc;
}

json run_level(const Options& opt) {
    brar::McConfig cfg(opt.model(), opt.truth(), opt.test_config(), opt.n, opt.reps,
                       opt.seed);
    cfg.retry_limit = opt.retry_limit;
    cfg.jobs = opt.resolved_jobs();
    const auto report = brar::empirical_level(cfg);
    std::cerr << "level: " << report.rejection_rate << " +- " << report.mc_stderr
              << " (" << report.runtime_seconds << " s)\n";
    json doc = brar::to_json(report, opt.dump_z);
    doc["experiment"] = "level";
    doc["model"] = {{"p", cfg.model.p}, {"theta", cfg.model.theta}};
    doc["n"] = opt.n;
    doc["seed"] = opt.seed;
    return doc;
}

json run_power(const Options& opt, const std::string& sweep,
               const std::string& grid_text, const std::string& alternative) {
    brar::McConfig base(opt.model(), opt.null_density(), opt.test_config(), opt.n,
                        opt.reps, opt.seed);
    base.retry_limit = opt.retry_limit;
    base.jobs = opt.resolved_jobs();

    struct Point {
        std::string label;
        double parameter;
        brar::NoiseSpec alternative;
    };
    std::vector<Point> points;
    if (!alternative.empty()) {
        points.push_back({alternative, 0.0, brar::NoiseSpec::parse(alternative)});
    } else if (sweep == "m") {
        for (double m : parse_linear_grid(grid_text))
            points.push_back({"normal:" + format_double(m) + ",1", m,
                              brar::NoiseSpec::normal(m, 1.0)});
    } else if (sweep == "sigma2") {
        for (double s2 : parse_linear_grid(grid_text))
            points.push_back({"normal:0," + format_double(s2), s2,
                              brar::NoiseSpec::normal(0.0, s2)});
    } else {
        throw ConfigError("power: need --sweep m|sigma2 with --grid, or --alternative");
    }

    json results = json::array();
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        brar::McConfig cfg = base;
        cfg.seed = brar::derive_stream(opt.seed, i + 5000);
        const auto report = brar::empirical_power(cfg, points[i].alternative);
        json entry = brar::to_json(report, opt.dump_z);
        entry["alternative"] = points[i].label;
        entry["parameter"] = points[i].parameter;
        results.push_back(entry);
        std::string row = format_double(points[i].parameter) + "," +
                          format_double(report.rejection_rate) + "," +
                          format_double(report.mc_stderr) + "," +
                          std::to_string(report.retries);
        if (report.ks_rejection_rate)
            row += "," + format_double(*report.ks_rejection_rate);
        rows.push_back(row);
    }
    write_csv(opt.csv,
              opt.with_ks ? "parameter,power,stderr,retries,ks_power"
                          : "parameter,power,stderr,retries",
              rows);
    return json{{"experiment", "power"},
                {"model", {{"p", opt.model().p}, {"theta", opt.model().theta}}},
                {"n", opt.n},
                {"seed", opt.seed},
                {"points", results}};
}

json run_calibrate(const Options& opt, const std::string& range_text, double target) {
    const auto colon = range_text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("calibrate: expected --range lo:hi");
    const double lo = std::stod(range_text.substr(0, colon));
    const double hi = std::stod(range_text.substr(colon + 1));
    const auto result =
        brar::calibrate_h0(target, opt.make_kernel(), opt.n, lo, hi, opt.kappa,
                           opt.delta, opt.reps, opt.seed, opt.resolved_jobs());
    json doc = brar::to_json(result);
    doc["experiment"] = "calibrate";
    doc["target"] = target;
    doc["n"] = opt.n;
    return doc;
}

json run_ratecheck(const Options& opt, const std::string& quantity,
                   const std::string& ngrid_text) {
    const auto grid = parse_doubling_grid(ngrid_text);
    const auto report = brar::rate_check(quantity, opt.model(), grid, opt.reps,
                                         opt.seed, opt.resolved_jobs());
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < report.n_grid.size(); ++i)
        rows.push_back(std::to_string(report.n_grid[i]) + "," +
                       format_double(report.medians[i]));
    write_csv(opt.csv, "n,median", rows);
    json doc = brar::to_json(report);
    doc["experiment"] = "ratecheck";
    doc["seed"] = opt.seed;
    return doc;
}

json run_wiener(const Options& opt, long steps) {
    const auto q = brar::wiener_functional_quantiles(opt.reps, steps, opt.seed,
                                                     opt.resolved_jobs());
    json doc = brar::to_json(q);
    doc["experiment"] = "wiener-quantiles";
    doc["reps"] = opt.reps;
    doc["steps"] = steps;
    doc["seed"] = opt.seed;
    return doc;
}

double default_h0(const std::string& kernel, long n) {
    if (kernel == "gaussian") {
        if (n == 50) return 0.10;
        if (n == 100) return 0.14;
        if (n == 500) return 0.14;
    } else if (kernel == "uniform") {
        if (n == 50) return 0.20;
        if (n == 100) return 0.25;
        if (n == 500) return 0.32;
    }
    throw ConfigError("table1: no built-in h0 for kernel '" + kernel + "', n=" +
                      std::to_string(n) + "; pass --h0");
}

json run_table1(Options opt, const std::string& kernels_csv,
                const std::string& n_csv, const std::string& models_csv,
                bool explicit_h0) {
    std::vector<std::string> kernels;
    {
        std::stringstream in(kernels_csv);
        std::string item;
        while (std::getline(in, item, ',')) kernels.push_back(item);
    }
    const auto n_list = parse_longs(n_csv);
    std::vector<std::string> models;
    {
        std::stringstream in(models_csv);
        std::string item;
        while (std::getline(in, item, ',')) models.push_back(item);
    }

    json cells = json::array();
    std::vector<std::string> rows;
    for (const auto& kernel : kernels) {
        for (long n : n_list) {
            const double h0 = explicit_h0 ? opt.h0 : default_h0(kernel, n);
            for (const auto& model_alias : models) {
                Options cell = opt;
                cell.kernel = kernel;
                cell.h0 = h0;
                cell.n = n;
                cell.model_alias = model_alias;
                cell.theta_csv.clear();
                brar::McConfig cfg(cell.model(), cell.null_density(),
                                   cell.test_config(), n, opt.reps,
                                   brar::derive_stream(opt.seed,
                                                       std::hash<std::string>{}(
                                                           kernel + model_alias) ^
                                                           static_cast<std::uint64_t>(n)));
                cfg.retry_limit = opt.retry_limit;
                cfg.jobs = opt.resolved_jobs();
                const auto report = brar::empirical_level(cfg);
                std::cerr << "table1 " << kernel << " n=" << n << " " << model_alias
                          << ": " << report.rejection_rate << "\n";
                json entry = brar::to_json(report);
                entry["kernel"] = kernel;
                entry["n"] = n;
                entry["h0"] = h0;
                entry["model"] = model_alias;
                cells.push_back(entry);
                rows.push_back(kernel + "," + std::to_string(n) + "," +
                               format_double(h0) + "," + model_alias + "," +
                               format_double(report.rejection_rate) + "," +
                               format_double(report.mc_stderr) + "," +
                               std::to_string(report.retries));
            }
        }
    }
    write_csv(opt.csv, "kernel,n,h0,model,rate,stderr,retries", rows);
    return json{{"experiment", "table1"}, {"seed", opt.seed}, {"cells", cells}};
}

// ---------------------------------------------------------------------------
// Experiment files: one JSON document describing a single experiment.

json run_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read experiment file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("experiment file: ") + e.what());
    }
    if (!doc.contains("experiment"))
        throw ConfigError("experiment file: missing 'experiment'");
    const std::string kind = doc.at("experiment").get<std::string>();

    static const std::set<std::string> common = {
        "experiment", "model", "theta", "noise", "f0",  "kernel", "eps_s",
        "h0",         "kappa", "delta", "alpha", "n",   "reps",   "seed",
        "jobs",       "retry_limit",    "ks",    "dump_z", "phi0", "out", "csv"};

    auto allowed = common;
    if (kind == "power") {
        allowed.insert({"sweep", "grid", "alternative"});
    } else if (kind == "calibrate") {
        allowed.insert({"target", "range"});
    } else if (kind == "ratecheck") {
        allowed.insert({"quantity", "ngrid"});
    } else if (kind == "wiener-quantiles") {
        allowed.insert({"steps"});
    } else if (kind == "table1") {
        allowed.insert({"kernels", "n_list", "models"});
    } else if (kind != "simulate" && kind != "estimate" && kind != "test" &&
               kind != "level") {
        throw ConfigError("experiment file: unknown experiment '" + kind + "'");
    }
    brar::reject_unknown_fields(doc, allowed, "experiment file");

    Options opt;
    if (doc.contains("model")) opt.model_alias = doc.at("model").get<std::string>();
    if (doc.contains("theta")) {
        const auto values = doc.at("theta").get<std::vector<double>>();
        std::string csv;
        for (double v : values) csv += (csv.empty() ? "" : ",") + format_double(v);
        opt.theta_csv = csv;
    }
    if (doc.contains("noise")) opt.noise = doc.at("noise").get<std::string>();
    if (doc.contains("f0")) opt.f0 = doc.at("f0").get<std::string>();
    if (doc.contains("kernel")) opt.kernel = doc.at("kernel").get<std::string>();
    if (doc.contains("eps_s")) opt.eps_s = doc.at("eps_s").get<double>();
    if (doc.contains("h0")) opt.h0 = doc.at("h0").get<double>();
    if (doc.contains("kappa")) opt.kappa = doc.at("kappa").get<double>();
    if (doc.contains("delta")) opt.delta = doc.at("delta").get<double>();
    if (doc.contains("alpha")) opt.alpha = doc.at("alpha").get<double>();
    if (doc.contains("n")) opt.n = doc.at("n").get<long>();
    if (doc.contains("reps")) opt.reps = doc.at("reps").get<long>();
    if (doc.contains("seed")) opt.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("jobs")) opt.jobs = doc.at("jobs").get<int>();
    if (doc.contains("retry_limit")) opt.retry_limit = doc.at("retry_limit").get<int>();
    if (doc.contains("ks")) opt.with_ks = doc.at("ks").get<bool>();
    if (doc.contains("dump_z")) opt.dump_z = doc.at("dump_z").get<bool>();
    if (doc.contains("out")) opt.out = doc.at("out").get<std::string>();
    if (doc.contains("csv")) opt.csv = doc.at("csv").get<std::string>();
    if (doc.contains("phi0")) {
        const auto values = doc.at("phi0").get<std::vector<double>>();
        std::string csv;
        for (double v : values) csv += (csv.empty() ? "" : ",") + format_double(v);
        opt.phi0_csv = csv;
    }

    json result;
    if (kind == "simulate") {
        result = run_simulate(opt);
    } else if (kind == "estimate") {
        result = run_estimate(opt);
    } else if (kind == "test") {
        result = run_test(opt);
    } else if (kind == "level") {
        result = run_level(opt);
    } else if (kind == "power") {
        result = run_power(opt,
                           doc.value("sweep", std::string{}),
                           doc.value("grid", std::string{}),
                           doc.value("alternative", std::string{}));
    } else if (kind == "calibrate") {
        result = run_calibrate(opt, doc.value("range", std::string{"0.05:0.5"}),
                               doc.value("target", 0.05));
    } else if (kind == "ratecheck") {
        result = run_ratecheck(opt, doc.value("quantity", std::string{}),
                               doc.value("ngrid", std::string{"256:8192"}));
    } else if (kind == "wiener-quantiles") {
        result = run_wiener(opt, doc.value("steps", 4096L));
    } else if (kind == "table1") {
        result = run_table1(opt, doc.value("kernels", std::string{"gaussian,uniform"}),
                            doc.value("n_list", std::string{"50,100,500"}),
                            doc.value("models", std::string{"m0,m1,m2,m3,m4,m5"}),
                            doc.contains("h0"));
    }
    write_text(opt.out, result.dump(2));
    return result;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bickel-Rosenblatt goodness-of-fit testing for AR(p) residuals"};
    app.require_subcommand(1);

    Options opt;

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate one trajectory");
    add_model_flags(simulate_cmd, opt);
    simulate_cmd->add_option("--noise", opt.noise, "noise spec, e.g. normal:0,1");
    simulate_cmd->add_option("--n", opt.n, "trajectory length");
    simulate_cmd->add_option("--phi0", opt.phi0_csv, "presample values X_0,...");
    simulate_cmd->add_option("--seed", opt.seed, "rng seed");
    add_io_flags(simulate_cmd, opt);

    auto* estimate_cmd =
        app.add_subcommand("estimate", "simulate and fit by least squares");
    add_model_flags(estimate_cmd, opt);
    estimate_cmd->add_option("--noise", opt.noise, "noise spec");
    estimate_cmd->add_option("--n", opt.n, "trajectory length");
    estimate_cmd->add_option("--phi0", opt.phi0_csv, "presample values");
    estimate_cmd->add_option("--seed", opt.seed, "rng seed");
    add_io_flags(estimate_cmd, opt);

    auto* test_cmd =
        app.add_subcommand("test", "one simulate-fit-test pipeline run");
    add_model_flags(test_cmd, opt);
    test_cmd->add_option("--noise", opt.noise, "true noise (defaults to f0)");
    test_cmd->add_option("--n", opt.n, "trajectory length");
    test_cmd->add_option("--seed", opt.seed, "rng seed");
    add_test_flags(test_cmd, opt);
    add_io_flags(test_cmd, opt);

    auto* level_cmd = app.add_subcommand("level", "empirical level under the null");
    add_model_flags(level_cmd, opt);
    level_cmd->add_option("--n", opt.n, "sample size per replication");
    level_cmd->add_option("--seed", opt.seed, "master seed");
    add_test_flags(level_cmd, opt);
    add_mc_flags(level_cmd, opt);
    add_io_flags(level_cmd, opt);

    std::string sweep, grid_text, alternative;
    auto* power_cmd = app.add_subcommand("power", "empirical power sweeps");
    add_model_flags(power_cmd, opt);
    power_cmd->add_option("--n", opt.n, "sample size per replication");
    power_cmd->add_option("--seed", opt.seed, "master seed");
    power_cmd->add_option("--sweep", sweep, "m | sigma2");
    power_cmd->add_option("--grid", grid_text, "sweep grid lo:hi:count");
    power_cmd->add_option("--alternative", alternative,
                          "single alternative, e.g. student:1");
    add_test_flags(power_cmd, opt);
    add_mc_flags(power_cmd, opt);
    add_io_flags(power_cmd, opt);

    double target = 0.05;
    std::string range_text = "0.05:0.5";
    auto* calibrate_cmd =
        app.add_subcommand("calibrate", "search h0 for a target level");
    calibrate_cmd->add_option("--target", target, "target level");
    calibrate_cmd->add_option("--range", range_text, "h0 search range lo:hi");
    calibrate_cmd->add_option("--n", opt.n, "sample size");
    calibrate_cmd->add_option("--seed", opt.seed, "master seed");
    add_test_flags(calibrate_cmd, opt);
    add_mc_flags(calibrate_cmd, opt);
    add_io_flags(calibrate_cmd, opt);

    std::string quantity, ngrid_text = "256:8192";
    auto* rate_cmd = app.add_subcommand("ratecheck", "empirical growth-rate check");
    rate_cmd->add_option("--quantity", quantity, "catalogue quantity id")->required();
    rate_cmd->add_option("--ngrid", ngrid_text, "doubling grid lo:hi");
    add_model_flags(rate_cmd, opt);
    rate_cmd->add_option("--seed", opt.seed, "master seed");
    add_mc_flags(rate_cmd, opt);
    add_io_flags(rate_cmd, opt);

    long steps = 4096;
    auto* wiener_cmd =
        app.add_subcommand("wiener-quantiles", "limit-functional quantile table");
    wiener_cmd->add_option("--steps", steps, "grid points per path");
    wiener_cmd->add_option("--seed", opt.seed, "master seed");
    add_mc_flags(wiener_cmd, opt);
    add_io_flags(wiener_cmd, opt);

    std::string kernels_csv = "gaussian,uniform";
    std::string n_csv = "50,100,500";
    std::string models_csv = "m0,m1,m2,m3,m4,m5";
    auto* table_cmd =
        app.add_subcommand("table1", "empirical level grid as CSV");
    table_cmd->add_option("--kernels", kernels_csv, "comma list of kernels");
    table_cmd->add_option("--n-list", n_csv, "comma list of sample sizes");
    table_cmd->add_option("--models", models_csv, "comma list of model aliases");
    table_cmd->add_option("--seed", opt.seed, "master seed");
    add_test_flags(table_cmd, opt);  // --h0 here overrides the built-in map
    add_mc_flags(table_cmd, opt);
    add_io_flags(table_cmd, opt);

    std::string experiment_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment file");
    run_cmd->add_option("file", experiment_path, "experiment JSON document")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        json result;
        if (app.got_subcommand(simulate_cmd)) {
            result = run_simulate(opt);
        } else if (app.got_subcommand(estimate_cmd)) {
            result = run_estimate(opt);
        } else if (app.got_subcommand(test_cmd)) {
            result = run_test(opt);
        } else if (app.got_subcommand(level_cmd)) {
            result = run_level(opt);
        } else if (app.got_subcommand(power_cmd)) {
            result = run_power(opt, sweep, grid_text, alternative);
        } else if (app.got_subcommand(calibrate_cmd)) {
            result = run_calibrate(opt, range_text, target);
        } else if (app.got_subcommand(rate_cmd)) {
            result = run_ratecheck(opt, quantity, ngrid_text);
        } else if (app.got_subcommand(wiener_cmd)) {
            result = run_wiener(opt, steps);
        } else if (app.got_subcommand(table_cmd)) {
            result = run_table1(opt, kernels_csv, n_csv, models_csv,
                                table_cmd->count("--h0") > 0);
        } else if (app.got_subcommand(run_cmd)) {
            run_experiment_file(experiment_path);
            return exit_ok;
        }
        write_text(opt.out, result.dump(2));
        return exit_ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numeric;
    }
}
