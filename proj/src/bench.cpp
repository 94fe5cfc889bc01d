#include "ccrm/bench.hpp"
#include "ccrm/io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace ccrm {

namespace {

constexpr std::uint64_t kStartPointStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kReseedStride = 1000003ULL;
constexpr int kMaxReseeds = 16;

const char* const kDefaultMethods[] = {"ccrm-cyclic", "ccrm-mv-distance", "ccrm-mv-function",
                                       "sepm", "crm-p"};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

Termination parse_termination(const std::string& s) {
    if (s == "step-small") return Termination::StepSmall;
    if (s == "residual-small") return Termination::ResidualSmall;
    if (s == "iter-limit") return Termination::IterLimit;
    throw InvalidArgument("unknown termination '" + s + "'");
}

}  // namespace

MethodSpec method_from_name(std::string_view name) {
    MethodSpec spec{std::string(name), {}};
    constexpr std::string_view prefix = "ccrm-";
    if (name.substr(0, prefix.size()) == prefix) {
        spec.config.method = Method::CCRM;
        spec.config.control = parse_control(name.substr(prefix.size()));
    } else {
        spec.config.method = parse_method(name);
        if (spec.config.method == Method::CCRM) {
            throw ConfigurationError("name a cCRM control, e.g. ccrm-mv-distance");
        }
    }
    return spec;
}

void ExperimentSpec::validate() const {
    if (grid.empty()) throw ConfigurationError("experiment grid is empty");
    if (trials < 1) throw ConfigurationError("trials must be at least 1");
    if (methods.empty()) throw ConfigurationError("experiment needs at least one method");
    for (const auto& [n, m] : grid) {
        EllipsoidGenConfig{n, m, gamma, lambda_scale, 0}.validate();
    }
    SolverConfig probe;
    probe.epsilon = epsilon;
    probe.max_iter = max_iter;
    probe.validate();
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    try {
        for (const auto& cell : j.at("grid")) {
            spec.grid.emplace_back(cell.at(0).get<std::size_t>(), cell.at(1).get<std::size_t>());
        }
        spec.trials = j.value("trials", spec.trials);
        spec.epsilon = j.value("epsilon", spec.epsilon);
        spec.max_iter = j.value("max_iter", spec.max_iter);
        spec.base_seed = j.value("base_seed", spec.base_seed);
        spec.gamma = j.value("gamma", spec.gamma);
        spec.lambda_scale = j.value("lambda", spec.lambda_scale);
        if (j.contains("methods")) {
            for (const auto& m : j["methods"]) {
                if (m.is_string()) {
                    spec.methods.push_back(method_from_name(m.get<std::string>()));
                } else {
                    MethodSpec ms;
                    ms.config = io::config_from_json(m);
                    ms.name = m.value("name", std::string(to_string(ms.config.method)));
                    spec.methods.push_back(std::move(ms));
                }
            }
        } else {
            for (const char* name : kDefaultMethods) spec.methods.push_back(method_from_name(name));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("malformed experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

nlohmann::json ExperimentSpec::to_json() const {
    nlohmann::json j;
    j["grid"] = nlohmann::json::array();
    for (const auto& [n, m] : grid) j["grid"].push_back({n, m});
    j["trials"] = trials;
    j["epsilon"] = epsilon;
    j["max_iter"] = max_iter;
    j["base_seed"] = base_seed;
    j["gamma"] = gamma;
    j["lambda"] = lambda_scale;
    j["methods"] = nlohmann::json::array();
    for (const auto& m : methods) {
        auto c = io::config_to_json(m.config);
        c["name"] = m.name;
        j["methods"].push_back(std::move(c));
    }
    return j;
}

VectorXd trial_start_point(std::uint64_t seed, std::size_t n) {
    Rng rng(seed ^ kStartPointStream);
    return sample_box_point(rng, n);
}

BenchmarkSummary run_experiment(const ExperimentSpec& spec, const Logger& log) {
    spec.validate();
    BenchmarkSummary summary;
    for (const auto& [n, m] : spec.grid) {
        for (std::size_t t = 0; t < spec.trials; ++t) {
            std::uint64_t seed = spec.base_seed + t;
            std::optional<GeneratedInstance> instance;
            for (int reseed = 0; !instance; ++reseed) {
                try {
                    instance = generate_instance(
                        EllipsoidGenConfig{n, m, spec.gamma, spec.lambda_scale, seed});
                } catch (const GenerationError& e) {
                    if (reseed == kMaxReseeds) throw;
                    const std::uint64_t next = seed + kReseedStride;
                    if (log) {
                        log("generation failed for n=" + std::to_string(n) + " m=" +
                            std::to_string(m) + " seed=" + std::to_string(seed) + " (" + e.what() +
                            "); reseeding with " + std::to_string(next));
                    }
                    seed = next;
                }
            }
            if (log && instance->attempts > 1) {
                log("instance n=" + std::to_string(n) + " m=" + std::to_string(m) + " seed=" +
                    std::to_string(seed) + " needed " + std::to_string(instance->attempts) +
                    " attempts");
            }
            const VectorXd x0 = trial_start_point(seed, n);
            for (const auto& method : spec.methods) {
                SolverConfig config = method.config;
                config.epsilon = spec.epsilon;
                config.max_iter = spec.max_iter;
                config.seed = seed;
                config.record_iterates = false;

                TrialResult row;
                row.n = n;
                row.m = m;
                row.trial = t;
                row.seed = seed;
                row.method = method.name;
                const IterationTrace<double>* trace = nullptr;
                std::optional<IterationTrace<double>> owned;
                try {
                    owned = solve(instance->problem, config, x0);
                    trace = &*owned;
                } catch (const SolveFailure<double>& failure) {
                    if (log) log(method.name + " aborted on seed " + std::to_string(seed) + ": " + failure.what());
                    owned = failure.trace();
                    trace = &*owned;
                    owned->termination = Termination::IterLimit;
                }
                row.iterations = trace->iterations();
                row.final_error = trace->final_residual();
                row.cpu_time_s = trace->wall_time_s;
                row.termination = trace->termination;
                row.solved = row.final_error <= spec.epsilon;
                row.projection_evals =
                    trace->projection_evals.empty() ? 0 : trace->projection_evals.back();
                summary.trials.push_back(std::move(row));
            }
        }
    }
    std::vector<std::string> order;
    for (const auto& m : spec.methods) order.push_back(m.name);
    summary.cells = summarize(summary.trials, order);
    summary.profile = profile_from_trials(summary.trials, "cpu_time_s");
    return summary;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
    out << "n,m,trial,seed,method,iterations,final_error,cpu_time_s,termination,solved,"
           "projection_evals\n";
    const auto old_precision = out.precision(17);
    for (const auto& r : trials) {
        out << r.n << ',' << r.m << ',' << r.trial << ',' << r.seed << ',' << r.method << ','
            << r.iterations << ',' << r.final_error << ',' << r.cpu_time_s << ','
            << to_string(r.termination) << ',' << (r.solved ? 1 : 0) << ',' << r.projection_evals
            << '\n';
    }
    out.precision(old_precision);
}

std::vector<TrialResult> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("empty trials CSV");
    const auto header = split(line, ',');
    auto column = [&](std::string_view name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw InvalidArgument("trials CSV lacks column '" + std::string(name) + "'");
    };
    const std::size_t cn = column("n"), cm = column("m"), ct = column("trial"),
                      cs = column("seed"), cme = column("method"), ci = column("iterations"),
                      ce = column("final_error"), ctime = column("cpu_time_s"),
                      cterm = column("termination"), csol = column("solved"),
                      cp = column("projection_evals");
    std::vector<TrialResult> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) {
            throw InvalidArgument("trials CSV line " + std::to_string(lineno) + " has " +
                                  std::to_string(f.size()) + " fields");
        }
        try {
            TrialResult r;
            r.n = std::stoul(f[cn]);
            r.m = std::stoul(f[cm]);
            r.trial = std::stoul(f[ct]);
            r.seed = std::stoull(f[cs]);
            r.method = f[cme];
            r.iterations = std::stoul(f[ci]);
            r.final_error = std::stod(f[ce]);
            r.cpu_time_s = std::stod(f[ctime]);
            r.termination = parse_termination(f[cterm]);
            r.solved = f[csol] == "1";
            r.projection_evals = std::stoul(f[cp]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw InvalidArgument("trials CSV line " + std::to_string(lineno) + " is malformed");
        }
    }
    return rows;
}

nlohmann::json summary_to_json(const BenchmarkSummary& summary) {
    nlohmann::json j;
    auto stat = [](const Stat& s) { return nlohmann::json{{"median", s.median}, {"max", s.max}}; };
    j["cells"] = nlohmann::json::array();
    for (const auto& c : summary.cells) {
        j["cells"].push_back({{"n", c.n},
                              {"m", c.m},
                              {"method", c.method},
                              {"cpu_time_s", stat(c.cpu_time_s)},
                              {"final_error", stat(c.final_error)},
                              {"iterations", stat(c.iterations)},
                              {"solved", c.solved},
                              {"failed", c.failed}});
    }
    const auto& p = summary.profile;
    j["profile"] = {{"measure", "cpu_time_s"},
                    {"problems", p.problems},
                    {"excluded", p.excluded},
                    {"tau", p.tau},
                    {"methods", p.methods},
                    {"rho", p.rho}};
    return j;
}

}  // namespace ccrm
