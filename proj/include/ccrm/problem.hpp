#pragma once

#include "ccrm/convex_set.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ccrm {

/// Find x in the intersection of the sets.
template <typename Scalar = double>
class FeasibilityProblem {
public:
    /// Throws InvalidArgument when fewer than one set is given, when the sets disagree on
    /// the dimension, or when the certified point misses a set by more than 1e-10.
    FeasibilityProblem(std::vector<ConvexSet<Scalar>> sets,
                       std::optional<Vector<Scalar>> certified_point = std::nullopt,
                       std::string instance_id = {})
        : sets_(std::move(sets)),
          certified_point_(std::move(certified_point)),
          instance_id_(std::move(instance_id)) {
        if (sets_.empty()) throw InvalidArgument("a feasibility problem needs at least one set");
        dimension_ = sets_.front().dimension();
        for (const auto& s : sets_) {
            if (s.dimension() != dimension_) {
                throw DimensionMismatch(static_cast<std::size_t>(dimension_),
                                        static_cast<std::size_t>(s.dimension()));
            }
        }
        if (certified_point_) {
            check_dimension(*certified_point_, dimension_);
            for (std::size_t i = 0; i < sets_.size(); ++i) {
                if (!membership(sets_[i], *certified_point_, Scalar(1e-10))) {
                    throw InvalidArgument("certified point is not in set " + std::to_string(i));
                }
            }
        }
    }

    Eigen::Index dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return sets_.size(); }
    const ConvexSet<Scalar>& set(std::size_t i) const { return sets_.at(i); }
    const std::vector<ConvexSet<Scalar>>& sets() const noexcept { return sets_; }
    const std::optional<Vector<Scalar>>& certified_point() const noexcept {
        return certified_point_;
    }
    const std::string& instance_id() const noexcept { return instance_id_; }

    /// True when every set has a scalar defining function.
    bool has_defining_functions() const noexcept {
        for (const auto& s : sets_) {
            if (!s.has_defining_function()) return false;
        }
        return true;
    }

private:
    std::vector<ConvexSet<Scalar>> sets_;
    std::optional<Vector<Scalar>> certified_point_;
    std::string instance_id_;
    Eigen::Index dimension_{};
};

/// e(x) = sum_i |P_i(x) - x|; zero exactly on the intersection.
template <typename Scalar>
Scalar residual(const FeasibilityProblem<Scalar>& problem, const Vector<Scalar>& x) {
    check_dimension(x, problem.dimension());
    Scalar total = Scalar(0);
    for (const auto& s : problem.sets()) total += (project(s, x) - x).norm();
    return total;
}

}  // namespace ccrm
