#pragma once

#include "ccrm/problem.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccrm {

enum class ControlKind { Cyclic, AlmostCyclic, MostViolatedDistance, MostViolatedFunction };

/// CLI / config spelling: "cyclic", "almost-cyclic", "mv-distance", "mv-function".
inline std::string_view to_string(ControlKind kind) {
    switch (kind) {
        case ControlKind::Cyclic: return "cyclic";
        case ControlKind::AlmostCyclic: return "almost-cyclic";
        case ControlKind::MostViolatedDistance: return "mv-distance";
        case ControlKind::MostViolatedFunction: return "mv-function";
    }
    return "?";
}

inline ControlKind parse_control(std::string_view name) {
    if (name == "cyclic") return ControlKind::Cyclic;
    if (name == "almost-cyclic") return ControlKind::AlmostCyclic;
    if (name == "mv-distance") return ControlKind::MostViolatedDistance;
    if (name == "mv-function") return ControlKind::MostViolatedFunction;
    throw ConfigurationError("unknown control '" + std::string(name) + "'");
}

/// Indices are 0-based. criterion_values drove the choice of ell, r_criterion_values the
/// choice of r; both are empty for the cyclic controls.
struct SelectionRecord {
    std::size_t k{};
    std::size_t ell{};
    std::size_t r{};
    std::vector<double> criterion_values;
    std::vector<double> r_criterion_values;

    bool operator==(const SelectionRecord&) const = default;
};

/// Chooses the pair (ell(k), r(k)) of sets the cCRM operator acts on.
///
/// Cyclic variants follow a periodic schedule indexed by k, so the policy itself carries
/// no mutable state. r(k) is the cyclic successor of ell(k) for them.
class ControlPolicy {
public:
    static ControlPolicy cyclic(std::size_t m) {
        require_sets(m);
        std::vector<std::size_t> schedule(m);
        for (std::size_t i = 0; i < m; ++i) schedule[i] = i;
        return ControlPolicy(ControlKind::Cyclic, m, std::move(schedule), m);
    }

    /// Periodic schedule that must visit every index within each q_bound consecutive
    /// selections; checked here over the periodic extension.
    static ControlPolicy almost_cyclic(std::size_t m, std::vector<std::size_t> schedule,
                                       std::size_t q_bound) {
        require_sets(m);
        if (q_bound < m) throw ConfigurationError("almost-cyclic bound Q must be at least m");
        if (schedule.empty()) throw ConfigurationError("almost-cyclic schedule is empty");
        for (auto i : schedule) {
            if (i >= m) throw ConfigurationError("almost-cyclic schedule index out of range");
        }
        std::vector<std::size_t> extended;
        while (extended.size() < schedule.size() + q_bound) {
            extended.insert(extended.end(), schedule.begin(), schedule.end());
        }
        if (!windows_cover(extended, m, q_bound)) {
            throw ConfigurationError("almost-cyclic schedule violates the coverage bound Q");
        }
        return ControlPolicy(ControlKind::AlmostCyclic, m, std::move(schedule), q_bound);
    }

    /// Back-and-forth sweep 0, 1, ..., m-1, m-2, ..., 1 with Q = max(m, 2m - 2).
    static ControlPolicy almost_cyclic(std::size_t m) {
        require_sets(m);
        std::vector<std::size_t> schedule;
        for (std::size_t i = 0; i < m; ++i) schedule.push_back(i);
        for (std::size_t i = m - 1; i-- > 1;) schedule.push_back(i);
        return almost_cyclic(m, std::move(schedule), std::max(m, 2 * m - 2));
    }

    static ControlPolicy most_violated_distance(std::size_t m) {
        require_sets(m);
        return ControlPolicy(ControlKind::MostViolatedDistance, m, {}, 0);
    }

    static ControlPolicy most_violated_function(std::size_t m) {
        require_sets(m);
        return ControlPolicy(ControlKind::MostViolatedFunction, m, {}, 0);
    }

    /// Policy of the given kind for the problem; rejects function-value control over a
    /// problem containing a set without a defining function.
    template <typename Scalar>
    static ControlPolicy make(ControlKind kind, const FeasibilityProblem<Scalar>& problem) {
        ControlPolicy policy = [&] {
            switch (kind) {
                case ControlKind::Cyclic: return cyclic(problem.size());
                case ControlKind::AlmostCyclic: return almost_cyclic(problem.size());
                case ControlKind::MostViolatedDistance:
                    return most_violated_distance(problem.size());
                case ControlKind::MostViolatedFunction:
                    return most_violated_function(problem.size());
            }
            throw ConfigurationError("unknown control kind");
        }();
        policy.validate(problem);
        return policy;
    }

    template <typename Scalar>
    void validate(const FeasibilityProblem<Scalar>& problem) const {
        if (problem.size() != m_) {
            throw ConfigurationError("policy built for " + std::to_string(m_) +
                                     " sets, problem has " + std::to_string(problem.size()));
        }
        if (kind_ == ControlKind::MostViolatedFunction && !problem.has_defining_functions()) {
            throw ConfigurationError(
                "function-value control needs a defining function for every set");
        }
    }

    ControlKind kind() const noexcept { return kind_; }
    std::size_t set_count() const noexcept { return m_; }
    const std::vector<std::size_t>& schedule() const noexcept { return schedule_; }

    /// Coverage bound Q; only defined for the cyclic variants.
    std::size_t q_bound() const {
        if (!is_cyclic()) throw ConfigurationError("most-violated controls have no coverage bound");
        return q_bound_;
    }

    bool is_cyclic() const noexcept {
        return kind_ == ControlKind::Cyclic || kind_ == ControlKind::AlmostCyclic;
    }

    /// ell(k) of a cyclic variant.
    std::size_t scheduled_index(std::size_t k) const { return schedule_.at(k % schedule_.size()); }

    static bool windows_cover(const std::vector<std::size_t>& ells, std::size_t m,
                              std::size_t q) {
        if (ells.size() < q) return true;
        std::vector<std::size_t> counts(m, 0);
        std::size_t covered = 0;
        auto add = [&](std::size_t i, int delta) {
            if (i >= m) return;
            if (delta > 0 && counts[i]++ == 0) ++covered;
            if (delta < 0 && --counts[i] == 0) --covered;
        };
        for (std::size_t j = 0; j < q; ++j) add(ells[j], +1);
        if (covered != m) return false;
        for (std::size_t j = q; j < ells.size(); ++j) {
            add(ells[j - q], -1);
            add(ells[j], +1);
            if (covered != m) return false;
        }
        return true;
    }

private:
    ControlPolicy(ControlKind kind, std::size_t m, std::vector<std::size_t> schedule,
                  std::size_t q_bound)
        : kind_(kind), m_(m), schedule_(std::move(schedule)), q_bound_(q_bound) {}

    static void require_sets(std::size_t m) {
        if (m < 1) throw ConfigurationError("a control policy needs at least one set");
    }

    ControlKind kind_;
    std::size_t m_;
    std::vector<std::size_t> schedule_;
    std::size_t q_bound_;
};

namespace detail {

template <typename Scalar>
struct Selection {
    SelectionRecord record;
    std::optional<Vector<Scalar>> proj_r_of_x;  // P_r(x) when the selection already computed it
    std::size_t projections = 0;
};

// First index of the maximum, skipping `skip`.
inline std::size_t argmax(const std::vector<double>& values,
                          std::optional<std::size_t> skip = std::nullopt) {
    std::size_t best = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (skip && *skip == i) continue;
        if (best == values.size() || values[i] > values[best]) best = i;
    }
    return best == values.size() ? 0 : best;
}

template <typename Scalar>
Selection<Scalar> select(const ControlPolicy& policy, const FeasibilityProblem<Scalar>& problem,
                         const Vector<Scalar>& x, std::size_t k) {
    check_dimension(x, problem.dimension());
    const std::size_t m = problem.size();
    Selection<Scalar> sel;
    sel.record.k = k;

    switch (policy.kind()) {
        case ControlKind::Cyclic:
        case ControlKind::AlmostCyclic: {
            sel.record.ell = policy.scheduled_index(k);
            sel.record.r = (sel.record.ell + 1) % m;
            break;
        }
        case ControlKind::MostViolatedDistance: {
            std::vector<Vector<Scalar>> proj(m);
            sel.record.criterion_values.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                proj[i] = project(problem.set(i), x);
                sel.record.criterion_values[i] = static_cast<double>((x - proj[i]).norm());
            }
            sel.projections += m;
            const std::size_t ell = argmax(sel.record.criterion_values);
            const Vector<Scalar>& y = proj[ell];
            sel.record.r_criterion_values.assign(m, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                if (i == ell) continue;  // P_ell(P_ell(x)) = P_ell(x)
                sel.record.r_criterion_values[i] =
                    static_cast<double>((y - project(problem.set(i), y)).norm());
                ++sel.projections;
            }
            sel.record.ell = ell;
            sel.record.r = argmax(sel.record.r_criterion_values,
                                  m >= 2 ? std::optional<std::size_t>(ell) : std::nullopt);
            sel.proj_r_of_x = std::move(proj[sel.record.r]);
            break;
        }
        case ControlKind::MostViolatedFunction: {
            sel.record.criterion_values.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                sel.record.criterion_values[i] =
                    static_cast<double>(evaluate_constraint(problem.set(i), x));
            }
            const std::size_t ell = argmax(sel.record.criterion_values);
            const Vector<Scalar> y = project(problem.set(ell), x);
            ++sel.projections;
            sel.record.r_criterion_values.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                sel.record.r_criterion_values[i] =
                    static_cast<double>(evaluate_constraint(problem.set(i), y));
            }
            sel.record.ell = ell;
            sel.record.r = argmax(sel.record.r_criterion_values,
                                  m >= 2 ? std::optional<std::size_t>(ell) : std::nullopt);
            if (sel.record.r == ell) sel.proj_r_of_x = y;
            break;
        }
    }
    return sel;
}

}  // namespace detail

/// ell(k), r(k) for the iterate x. Most-violated controls take the first index among ties
/// and choose r among the sets other than ell.
template <typename Scalar>
SelectionRecord select_pair(const ControlPolicy& policy, const FeasibilityProblem<Scalar>& problem,
                            const Vector<Scalar>& x, std::size_t k) {
    policy.validate(problem);
    return detail::select(policy, problem, x, k).record;
}

/// True iff every window of Q consecutive ell values in the history covers all m indices.
inline bool verify_window_coverage(const ControlPolicy& policy,
                                   const std::vector<SelectionRecord>& history) {
    if (history.empty()) throw InvalidArgument("selection history is empty");
    std::vector<std::size_t> ells;
    ells.reserve(history.size());
    for (const auto& rec : history) ells.push_back(rec.ell);
    return ControlPolicy::windows_cover(ells, policy.set_count(), policy.q_bound());
}

}  // namespace ccrm
