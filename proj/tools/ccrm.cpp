// ccrm command-line front end: generate, solve, bench, profile.
#include "ccrm/bench.hpp"
#include "ccrm/diagnostics.hpp"
#include "ccrm/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using ccrm::io::json;

namespace {

void emit_error(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else ccrm::io::write_text_file(path, text);
}

struct GenerateArgs {
    ccrm::EllipsoidGenConfig config;
    std::string out;
};

struct SolveArgs {
    std::string instance;
    std::string config;
    std::size_t n = 10, m = 3;
    std::string method = "ccrm";
    std::string control = "mv-distance";
    double eps = 1e-6;
    std::size_t max_iter = 3000;
    std::uint64_t seed = 0;
    std::string x0;
    bool no_step_test = false;
    bool record = false;
    std::string out, csv;
};

struct BenchArgs {
    std::string spec;
    std::string out = "-";
    std::string csv, tables, summary_csv, profile;
    bool quiet = false;
};

struct ProfileArgs {
    std::string csv;
    std::string out = "-";
    std::string measure = "cpu_time_s";
    std::size_t points = 64;
    std::size_t n = 0, m = 0;
};

void run_generate(const GenerateArgs& a) {
    const auto instance = ccrm::generate_instance(a.config);
    write_or_print(a.out, ccrm::io::instance_to_json(instance).dump(2) + "\n");
}

ccrm::VectorXd parse_x0(const std::string& text, std::size_t n) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        j = ccrm::io::read_json_file(text);
    }
    auto x = ccrm::io::vector_from_json(j);
    ccrm::check_dimension(x, static_cast<Eigen::Index>(n));
    return x;
}

void run_solve(SolveArgs a, const CLI::App& app) {
    ccrm::SolverConfig config;
    if (!a.config.empty()) config = ccrm::io::config_from_json(ccrm::io::read_json_file(a.config));
    if (app.count("--method") || a.config.empty()) config.method = ccrm::parse_method(a.method);
    if (app.count("--control") || a.config.empty()) config.control = ccrm::parse_control(a.control);
    if (app.count("--eps") || a.config.empty()) config.epsilon = a.eps;
    if (app.count("--max-iter") || a.config.empty()) config.max_iter = a.max_iter;
    if (app.count("--seed") || a.config.empty()) config.seed = a.seed;
    if (a.no_step_test) config.step_test = false;
    config.record_iterates = true;
    config.validate();

    std::optional<ccrm::FeasibilityProblem<double>> problem;
    if (!a.instance.empty()) {
        problem = ccrm::io::instance_from_json(ccrm::io::read_json_file(a.instance)).problem;
    } else {
        problem = ccrm::generate_instance({a.n, a.m, 1.0, 1.01, config.seed}).problem;
    }
    const auto n = static_cast<std::size_t>(problem->dimension());
    const ccrm::VectorXd x0 = a.x0.empty() ? ccrm::trial_start_point(config.seed, n) : parse_x0(a.x0, n);

    json result;
    result["instance_id"] = problem->instance_id();
    result["config"] = ccrm::io::config_to_json(config);
    result["x0"] = ccrm::io::vector_to_json(x0);
    ccrm::IterationTrace<double> trace;
    try {
        trace = ccrm::solve(*problem, config, x0);
    } catch (const ccrm::SolveFailure<double>& f) {
        result["error"] = {{"error", f.kind()}, {"cause", f.cause_kind()}, {"message", f.what()}};
        trace = f.trace();
    }
    json trace_json = ccrm::io::trace_to_json(trace);
    if (!a.record) trace_json.erase("iterates");
    result["trace"] = std::move(trace_json);

    if (problem->certified_point()) {
        result["fejer"] = ccrm::io::fejer_to_json(ccrm::fejer_certify(trace, *problem->certified_point(), 1e-10));
    }
    if (trace.iterates.size() > ccrm::RateOptions{}.window) {
        const auto reference = ccrm::limit_surrogate(*problem, config, trace);
        result["rates"] = ccrm::io::rates_to_json(
            ccrm::estimate_rates(trace, std::optional<ccrm::VectorXd>(reference)));
    } else {
        result["rates"] = nullptr;
    }
    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        if (!out) throw ccrm::InvalidArgument("cannot write '" + a.csv + "'");
        ccrm::io::write_trace_csv(out, trace);
    }
    write_or_print(a.out, result.dump(2) + "\n");
}

void run_bench(const BenchArgs& a) {
    const auto spec = ccrm::ExperimentSpec::from_json(ccrm::io::read_json_file(a.spec));
    ccrm::Logger log;
    if (!a.quiet) log = [](const std::string& msg) { std::cerr << json{{"log", msg}}.dump() << '\n'; };
    const auto summary = ccrm::run_experiment(spec, log);
    if (log && summary.profile.excluded > 0) {
        log(std::to_string(summary.profile.excluded) + " problems unsolved by every method were left out of the profile");
    }

    json j = ccrm::summary_to_json(summary);
    j["spec"] = spec.to_json();
    write_or_print(a.out, j.dump(2) + "\n");
    if (!a.csv.empty()) {
        std::ostringstream s;
        ccrm::write_trials_csv(s, summary.trials);
        ccrm::io::write_text_file(a.csv, s.str());
    }
    if (!a.summary_csv.empty()) {
        std::ostringstream s;
        ccrm::write_summary_csv(s, summary.cells);
        ccrm::io::write_text_file(a.summary_csv, s.str());
    }
    if (!a.tables.empty()) ccrm::io::write_text_file(a.tables, ccrm::format_tables(summary.cells));
    if (!a.profile.empty()) {
        std::ostringstream s;
        ccrm::write_profile_tsv(s, summary.profile);
        ccrm::io::write_text_file(a.profile, s.str());
    }
}

void run_profile(const ProfileArgs& a) {
    std::ifstream in(a.csv);
    if (!in) throw ccrm::InvalidArgument("cannot open '" + a.csv + "'");
    auto trials = ccrm::read_trials_csv(in);
    if (a.n || a.m) {
        std::erase_if(trials, [&](const ccrm::TrialResult& r) {
            return (a.n && r.n != a.n) || (a.m && r.m != a.m);
        });
    }
    if (trials.empty()) throw ccrm::InvalidArgument("no trial rows selected");
    const auto profile = ccrm::profile_from_trials(trials, a.measure, a.points);
    if (profile.excluded > 0) {
        std::cerr << json{{"log", std::to_string(profile.excluded) + " problems unsolved by every method excluded"}}.dump()
                  << '\n';
    }
    std::ostringstream s;
    ccrm::write_profile_tsv(s, profile);
    write_or_print(a.out, s.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex feasibility by centralized circumcentered reflections"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a random ellipsoid instance");
    g->add_option("--n", gen.config.n, "Dimension")->capture_default_str();
    g->add_option("--m", gen.config.m, "Number of ellipsoids")->capture_default_str();
    g->add_option("--seed", gen.config.seed, "Generator seed")->capture_default_str();
    g->add_option("--gamma", gen.config.gamma, "Shift of the first ellipsoid matrix")->capture_default_str();
    g->add_option("--lambda", gen.config.lambda_scale, "Overshoot of chained ellipsoids")->capture_default_str();
    g->add_option("-o,--out", gen.out, "Output file (stdout if omitted)");

    SolveArgs sol;
    auto* s = app.add_subcommand("solve", "Run one method on one instance");
    s->add_option("--instance", sol.instance, "Instance JSON; without it one is generated from --n --m --seed");
    s->add_option("--config", sol.config, "Solver config JSON; flags given explicitly override it");
    s->add_option("--n", sol.n)->capture_default_str();
    s->add_option("--m", sol.m)->capture_default_str();
    s->add_option("--method", sol.method, "ccrm | sepm | sipm | crm-p")->capture_default_str();
    s->add_option("--control", sol.control, "cyclic | almost-cyclic | mv-distance | mv-function")->capture_default_str();
    s->add_option("--eps", sol.eps)->capture_default_str();
    s->add_option("--max-iter", sol.max_iter)->capture_default_str();
    s->add_option("--seed", sol.seed, "Seed for the instance and the default x0")->capture_default_str();
    s->add_option("--x0", sol.x0, "Start point: JSON array or a file holding one");
    s->add_flag("--no-step-test", sol.no_step_test, "Stop only on the residual or the iteration limit");
    s->add_flag("--record-iterates", sol.record, "Include every iterate in the result");
    s->add_option("-o,--out", sol.out, "Result JSON file (stdout if omitted)");
    s->add_option("--csv", sol.csv, "Trace CSV file");

    BenchArgs ben;
    auto* b = app.add_subcommand("bench", "Run an experiment spec");
    b->add_option("spec", ben.spec, "ExperimentSpec JSON")->required();
    b->add_option("-o,--out", ben.out, "Summary JSON file")->capture_default_str();
    b->add_option("--csv", ben.csv, "Raw per-trial CSV");
    b->add_option("--summary-csv", ben.summary_csv, "median(max) CSV");
    b->add_option("--tables", ben.tables, "Aligned text tables");
    b->add_option("--profile", ben.profile, "CPU-time profile TSV");
    b->add_flag("-q,--quiet", ben.quiet, "No log lines on stderr");

    ProfileArgs pro;
    auto* p = app.add_subcommand("profile", "Performance profile from a raw CSV");
    p->add_option("csv", pro.csv, "Raw per-trial CSV")->required();
    p->add_option("-o,--out", pro.out, "TSV output")->capture_default_str();
    p->add_option("--measure", pro.measure, "cpu_time_s | iterations | projection_evals")->capture_default_str();
    p->add_option("--points", pro.points, "Grid points")->capture_default_str();
    p->add_option("--n", pro.n, "Keep only this dimension");
    p->add_option("--m", pro.m, "Keep only this set count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage_error", e.what(), 2);
        return 2;
    }

    try {
        if (*g) run_generate(gen);
        else if (*s) run_solve(sol, *s);
        else if (*b) run_bench(ben);
        else if (*p) run_profile(pro);
    } catch (const ccrm::Error& e) {
        emit_error(e.kind(), e.what(), 1);
        return 1;
    } catch (const std::exception& e) {
        emit_error("internal_error", e.what(), 3);
        return 3;
    }
    return 0;
}
