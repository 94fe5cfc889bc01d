#pragma once

#include "ccrm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace ccrm {

/// Result of checking |x^{k+1} - s| <= |x^k - s| along a trace.
struct FejerCertificate {
    VectorXd reference_point;
    double max_violation = 0.0;
    std::vector<double> per_step_margins;  // |x^{k+1} - s| - |x^k - s|
    double tolerance = 0.0;
    bool passed = true;
};

template <typename Scalar>
FejerCertificate fejer_certify(const IterationTrace<Scalar>& trace, const Vector<Scalar>& s,
                               double tol) {
    if (trace.iterates.empty()) {
        throw InvalidArgument("Fejer certification needs a trace with recorded iterates");
    }
    if (!(tol >= 0.0)) throw InvalidArgument("Fejer tolerance must be nonnegative");
    check_dimension(s, trace.iterates.front().size());
    FejerCertificate cert;
    cert.reference_point = s.template cast<double>();
    cert.tolerance = tol;
    double previous = static_cast<double>((trace.iterates.front() - s).norm());
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
        const double current = static_cast<double>((trace.iterates[k] - s).norm());
        cert.per_step_margins.push_back(current - previous);
        previous = current;
    }
    if (!cert.per_step_margins.empty()) {
        cert.max_violation =
            *std::max_element(cert.per_step_margins.begin(), cert.per_step_margins.end());
    }
    cert.passed = cert.max_violation <= tol;
    return cert;
}

/// Empirical Q/R rates of d_k = |x^k - x_bar|.
struct RateReport {
    std::vector<double> distances;
    std::vector<double> q_ratios;  // d_{k+1} / d_k, truncated at the first vanishing d
    double q_estimate = std::numeric_limits<double>::quiet_NaN();
    double r_estimate = std::numeric_limits<double>::quiet_NaN();
    bool superlinear_flag = false;
    std::size_t window = 3;
};

struct RateOptions {
    std::size_t window = 3;
    /// Distances at or below this floor count as zero.
    double zero_floor = 0.0;
    /// Largest final ratio still read as superlinear.
    double superlinear_threshold = 0.1;
};

/// Rates from a distance sequence d_0, d_1, ...
///
/// q_estimate is the largest ratio in the final window, r_estimate is
/// d_k^{1/k} at k = floor(3K/4), and the superlinear flag requires the final window of
/// ratios to be strictly decreasing with a last ratio <= the threshold. The ratio list
/// stops at the first d_{k+1} that vanishes (that ratio is kept as 0).
inline RateReport estimate_rates_from_distances(std::vector<double> distances,
                                                const RateOptions& opts = {}) {
    if (opts.window < 3) throw InvalidArgument("rate window must be at least 3");
    RateReport report;
    report.window = opts.window;
    for (std::size_t k = 0; k + 1 < distances.size(); ++k) {
        if (distances[k] <= opts.zero_floor) break;
        const bool vanished = distances[k + 1] <= opts.zero_floor;
        report.q_ratios.push_back(vanished ? 0.0 : distances[k + 1] / distances[k]);
        if (vanished) break;
    }
    const auto& q = report.q_ratios;
    if (!q.empty()) {
        const std::size_t first = q.size() > opts.window ? q.size() - opts.window : 0;
        report.q_estimate = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(first), q.end());
        if (q.size() >= opts.window) {
            bool decreasing = true;
            for (std::size_t k = first + 1; k < q.size(); ++k) decreasing &= q[k] < q[k - 1];
            report.superlinear_flag = decreasing && q.back() <= opts.superlinear_threshold;
        }
    }
    const std::size_t last = q.size();  // distances used: d_0 .. d_last
    if (last >= 1) {
        const std::size_t k = std::max<std::size_t>(1, (3 * last) / 4);
        report.r_estimate = std::pow(distances[k], 1.0 / static_cast<double>(k));
    }
    report.distances = std::move(distances);
    return report;
}

/// Rates of a recorded trace against `reference`, or against the final iterate when no
/// reference is given (the final iterate itself is then left out).
template <typename Scalar>
RateReport estimate_rates(const IterationTrace<Scalar>& trace,
                          const std::optional<Vector<Scalar>>& reference,
                          const RateOptions& opts = {}) {
    if (trace.iterates.empty()) throw InvalidArgument("rate estimation needs recorded iterates");
    if (trace.iterates.size() <= opts.window) {
        throw InvalidArgument("trace must be longer than the rate window");
    }
    const Vector<Scalar>& target = reference ? *reference : trace.iterates.back();
    const std::size_t count = reference ? trace.iterates.size() : trace.iterates.size() - 1;
    std::vector<double> d;
    d.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        d.push_back(static_cast<double>((trace.iterates[k] - target).norm()));
    }
    return estimate_rates_from_distances(std::move(d), opts);
}

/// Stand-in for the limit of a run: continue from its final iterate at a tight tolerance.
template <typename Scalar>
Vector<Scalar> limit_surrogate(const FeasibilityProblem<Scalar>& problem, SolverConfig config,
                               const IterationTrace<Scalar>& trace, double epsilon = 1e-12) {
    config.epsilon = epsilon;
    config.record_iterates = false;
    return solve(problem, config, trace.final_iterate).final_iterate;
}

}  // namespace ccrm
