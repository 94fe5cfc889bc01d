#pragma once

#include "ccrm/problem_gen.hpp"
#include "ccrm/solvers.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccrm {

/// A named solver configuration. Names: ccrm-cyclic, ccrm-almost-cyclic,
/// ccrm-mv-distance, ccrm-mv-function, sepm, sipm, crm-p.
struct MethodSpec {
    std::string name;
    SolverConfig config;
};

MethodSpec method_from_name(std::string_view name);

struct ExperimentSpec {
    std::vector<std::pair<std::size_t, std::size_t>> grid;  // (n, m)
    std::size_t trials = 30;
    std::vector<MethodSpec> methods;
    double epsilon = 1e-6;
    std::size_t max_iter = 3000;
    std::uint64_t base_seed = 0;
    double gamma = 1.0;
    double lambda_scale = 1.01;

    void validate() const;
    static ExperimentSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Initial point of a trial, drawn from its own stream so that instance generation
/// and x0 stay independent.
VectorXd trial_start_point(std::uint64_t seed, std::size_t n);

struct TrialResult {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::size_t iterations = 0;
    double final_error = 0.0;
    double cpu_time_s = 0.0;
    Termination termination = Termination::IterLimit;
    bool solved = false;
    std::size_t projection_evals = 0;
};

struct Stat {
    double median = 0.0;
    double max = 0.0;
};

/// Median (mean of the middle pair for even counts) and maximum.
Stat median_max(std::vector<double> values);

struct CellSummary {
    std::size_t n = 0;
    std::size_t m = 0;
    std::string method;
    Stat cpu_time_s;
    Stat final_error;
    Stat iterations;
    std::size_t solved = 0;
    std::size_t failed = 0;
};

/// Dolan-More profile: rho[s][t] is the fraction of problems whose measure for method s
/// is within tau[t] times the best measure on that problem.
struct PerformanceProfile {
    std::vector<std::string> methods;
    std::vector<double> tau;
    std::vector<std::vector<double>> rho;
    std::size_t problems = 0;
    std::size_t excluded = 0;  // problems no method solved
};

/// measures[p][s] is the measure of method s on problem p, std::nullopt for a failed run.
/// With an empty tau_grid the grid is log-spaced on [1, largest finite ratio] with
/// `grid_points` points, its last point being that ratio exactly.
PerformanceProfile performance_profile(const std::vector<std::vector<std::optional<double>>>& measures,
                                       std::vector<std::string> methods,
                                       std::vector<double> tau_grid = {},
                                       std::size_t grid_points = 64);

/// Ratio of a measure to the best one; +inf for failed runs.
double performance_ratio(std::optional<double> measure, double best);

struct BenchmarkSummary {
    std::vector<TrialResult> trials;
    std::vector<CellSummary> cells;
    PerformanceProfile profile;  // CPU time over all (n, m, trial) problems
};

using Logger = std::function<void(const std::string&)>;

/// For every (n, m) and trial t: instance from seed base_seed + t, x0 uniform on
/// [-100, 100]^n, every method from the same x0.
BenchmarkSummary run_experiment(const ExperimentSpec& spec, const Logger& log = {});

/// Raw per-trial CSV (one row per trial and method).
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);
std::vector<TrialResult> read_trials_csv(std::istream& in);

/// Columns of the raw CSV holding wall-clock measurements.
inline constexpr std::string_view kWallTimeColumns[] = {"cpu_time_s"};

/// Profile from raw trial rows on the given measure column
/// ("cpu_time_s", "iterations" or "projection_evals").
PerformanceProfile profile_from_trials(const std::vector<TrialResult>& trials,
                                       std::string_view measure = "cpu_time_s",
                                       std::size_t grid_points = 64);

/// Tab separated "tau\t<method>..." rows.
void write_profile_tsv(std::ostream& out, const PerformanceProfile& profile);

std::vector<CellSummary> summarize(const std::vector<TrialResult>& trials,
                                   const std::vector<std::string>& method_order);

/// One row per (n, m, method) with "median(max)" cells for time, error and iterations.
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// Three aligned tables (Time(s), Errors, Iterations) with rows (n, m) and one
/// "median(max)" column per method.
std::string format_tables(const std::vector<CellSummary>& cells);

/// "a(b)" with the shortest representation of each number.
std::string median_max_cell(const Stat& stat);

nlohmann::json summary_to_json(const BenchmarkSummary& summary);

}  // namespace ccrm
