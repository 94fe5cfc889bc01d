#include "ccrm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

namespace ccrm {

double performance_ratio(std::optional<double> measure, double best) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!measure) return inf;
    if (best > 0.0) return *measure / best;
    // best == 0: only an equally perfect run ties
    return *measure == best ? 1.0 : inf;
}

PerformanceProfile performance_profile(const std::vector<std::vector<std::optional<double>>>& measures,
                                       std::vector<std::string> methods,
                                       std::vector<double> tau_grid, std::size_t grid_points) {
    const std::size_t ns = methods.size();
    if (ns == 0) throw InvalidArgument("profile needs at least one method");
    if (grid_points < 2 && tau_grid.empty()) throw InvalidArgument("profile grid needs 2 points");

    PerformanceProfile out;
    out.methods = std::move(methods);
    std::vector<std::vector<double>> ratios;
    double tau_max = 1.0;
    for (const auto& row : measures) {
        if (row.size() != ns) throw DimensionMismatch(ns, row.size());
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : row) {
            if (v) {
                if (!std::isfinite(*v) || *v < 0.0) throw InvalidArgument("measures must be finite and >= 0");
                best = std::min(best, *v);
            }
        }
        if (!std::isfinite(best)) {
            ++out.excluded;
            continue;
        }
        std::vector<double> r(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            r[s] = performance_ratio(row[s], best);
            if (std::isfinite(r[s])) tau_max = std::max(tau_max, r[s]);
        }
        ratios.push_back(std::move(r));
    }
    out.problems = ratios.size();

    if (tau_grid.empty()) {
        if (tau_max == 1.0) {
            tau_grid = {1.0};
        } else {
            const double lmax = std::log(tau_max);
            tau_grid.resize(grid_points);
            for (std::size_t t = 0; t < grid_points; ++t) {
                tau_grid[t] = std::exp(lmax * static_cast<double>(t) / static_cast<double>(grid_points - 1));
            }
            tau_grid.front() = 1.0;
            tau_grid.back() = tau_max;
        }
    }
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end())) {
        throw InvalidArgument("tau grid must be nondecreasing");
    }
    out.tau = std::move(tau_grid);

    out.rho.assign(ns, std::vector<double>(out.tau.size(), 0.0));
    if (out.problems == 0) return out;
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t t = 0; t < out.tau.size(); ++t) {
            std::size_t hits = 0;
            for (const auto& r : ratios) hits += r[s] <= out.tau[t];
            out.rho[s][t] = static_cast<double>(hits) / static_cast<double>(out.problems);
        }
    }
    return out;
}

PerformanceProfile profile_from_trials(const std::vector<TrialResult>& trials,
                                       std::string_view measure, std::size_t grid_points) {
    auto value = [&](const TrialResult& r) -> double {
        if (measure == "cpu_time_s") return r.cpu_time_s;
        if (measure == "iterations") return static_cast<double>(r.iterations);
        if (measure == "projection_evals") return static_cast<double>(r.projection_evals);
        throw InvalidArgument("unknown profile measure '" + std::string(measure) + "'");
    };
    std::vector<std::string> methods;
    for (const auto& r : trials) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
            methods.push_back(r.method);
        }
    }
    using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::uint64_t>;
    std::map<Key, std::vector<std::optional<double>>> problems;
    std::vector<Key> order;
    for (const auto& r : trials) {
        const Key key{r.n, r.m, r.trial, r.seed};
        auto [it, fresh] = problems.try_emplace(key, methods.size());
        if (fresh) order.push_back(key);
        const auto s = static_cast<std::size_t>(
            std::find(methods.begin(), methods.end(), r.method) - methods.begin());
        if (r.solved) it->second[s] = value(r);
        else value(r);  // still reject unknown measures
    }
    std::vector<std::vector<std::optional<double>>> measures;
    for (const auto& key : order) measures.push_back(problems[key]);
    return performance_profile(measures, std::move(methods), {}, grid_points);
}

void write_profile_tsv(std::ostream& out, const PerformanceProfile& profile) {
    out << "tau";
    for (const auto& m : profile.methods) out << '\t' << m;
    out << '\n';
    const auto old = out.precision(17);
    for (std::size_t t = 0; t < profile.tau.size(); ++t) {
        out << profile.tau[t];
        for (std::size_t s = 0; s < profile.methods.size(); ++s) out << '\t' << profile.rho[s][t];
        out << '\n';
    }
    out.precision(old);
}

}  // namespace ccrm
