#include "ccrm/problem_gen.hpp"

#include <cmath>
#include <string>

namespace ccrm {

namespace {

constexpr std::size_t kMaxCenterDraws = 10000;
constexpr std::size_t kMaxAttempts = 200;
constexpr double kInteriorMargin = 1e-12;

}  // namespace

void EllipsoidGenConfig::validate() const {
    if (n < 2) throw ConfigurationError("generator needs n >= 2");
    if (m < 2) throw ConfigurationError("generator needs m >= 2");
    if (!(gamma > 0.0)) throw ConfigurationError("gamma must be positive");
    if (!(lambda_scale > 1.0)) throw ConfigurationError("lambda must exceed 1");
}

double center_form_value(const EllipsoidRecord& record, const VectorXd& x) {
    // (S^T S)^{-1} = Q Lambda^{-2} Q^T
    const VectorXd y = record.rotation.transpose() * (x - record.center);
    return y.cwiseQuotient(record.semi_axes).squaredNorm() - 1.0;
}

VectorXd sample_box_point(Rng& rng, std::size_t n) {
    std::uniform_real_distribution<double> box(-100.0, 100.0);
    VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = box(rng);
    return x;
}

MatrixXd householder_with_first_column(const VectorXd& direction) {
    const Eigen::Index n = direction.size();
    const VectorXd unit = direction.normalized();
    // H = I - 2 v v^T / |v|^2 maps e_1 to -unit for v = e_1 + unit and to unit for
    // v = e_1 - unit; the sign is picked to avoid cancellation in v.
    VectorXd v = unit;
    const bool flip = unit[0] >= 0.0;
    v[0] += flip ? 1.0 : -1.0;
    if (!flip) v = -v;
    MatrixXd q = MatrixXd::Identity(n, n) - (2.0 / v.squaredNorm()) * (v * v.transpose());
    if (flip) q.col(0) = -q.col(0);
    return q;
}

ConvexSet<double> generate_first_ellipsoid(const EllipsoidGenConfig& config, Rng& rng,
                                           EllipsoidRecord* record) {
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.n);
    const double density = 2.0 / static_cast<double>(config.n);
    std::bernoulli_distribution keep(std::min(1.0, density));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    MatrixXd factor = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (keep(rng)) factor(i, j) = normal(rng);
        }
    }
    MatrixXd A = config.gamma * MatrixXd::Identity(n, n) + factor.transpose() * factor;
    A = 0.5 * (A + A.transpose());
    VectorXd b(n);
    for (Eigen::Index j = 0; j < n; ++j) b[j] = unit(rng);
    const double c = 2.0 * b.dot(A * b) + 1.0;

    if (record) {
        record->index = 0;
        record->factor = factor;
        record->A = A;
        record->b = b;
        record->c = c;
    }
    return ConvexSet<double>::ellipsoid(std::move(A), std::move(b), c);
}

ChainedEllipsoid generate_chained_ellipsoid(const EllipsoidGenConfig& config, Rng& rng,
                                            std::size_t index,
                                            const std::vector<ConvexSet<double>>& existing,
                                            const std::optional<VectorXd>& anchor) {
    config.validate();
    if (index < 1 || existing.size() != index) {
        throw ConfigurationError("chained ellipsoid index must equal the number of existing sets");
    }
    if (index >= 2 && !anchor) throw ConfigurationError("ellipsoids past the second need an anchor");
    const std::size_t n = config.n;
    const double lambda = config.lambda_scale;

    EllipsoidRecord rec;
    rec.index = index;
    VectorXd center;
    for (;;) {
        if (rec.center_draws == kMaxCenterDraws) {
            throw GenerationError("no center outside the existing ellipsoids after " +
                                  std::to_string(kMaxCenterDraws) + " draws");
        }
        ++rec.center_draws;
        center = sample_box_point(rng, n);
        bool outside = true;
        for (const auto& s : existing) {
            if (membership(s, center, 0.0)) {
                outside = false;
                break;
            }
        }
        if (outside) break;
    }

    const VectorXd target = index == 1 ? project(existing.front(), center) : *anchor;
    const VectorXd axis = lambda * (target - center);
    const double axis_norm = axis.norm();
    if (!(axis_norm > 0.0)) throw GenerationError("degenerate semi-axis");

    std::uniform_real_distribution<double> shrink(0.1, 0.9);
    VectorXd semi_axes(static_cast<Eigen::Index>(n));
    semi_axes[0] = axis_norm;
    for (Eigen::Index j = 1; j < semi_axes.size(); ++j) semi_axes[j] = shrink(rng) * axis_norm;
    const MatrixXd q = householder_with_first_column(axis);

    // quadratic form of (x - center)^T Q Lambda^{-2} Q^T (x - center) <= 1
    MatrixXd metric = q * semi_axes.cwiseInverse().cwiseAbs2().asDiagonal() * q.transpose();
    metric = 0.5 * (metric + metric.transpose());
    VectorXd b = -(metric * center);
    const double c = 1.0 - center.dot(metric * center);

    rec.A = q * semi_axes.asDiagonal() * q.transpose();
    rec.b = b;
    rec.c = c;
    rec.center = center;
    rec.axis = axis;
    rec.rotation = q;
    rec.semi_axes = semi_axes;

    VectorXd new_anchor;
    if (index == 1) {
        // Put the anchor strictly inside xi_1 and xi_2 on the ray from the center through
        // P_{xi_1}(center): halfway between the projection and the far end of the chord
        // that is common to both ellipsoids.
        const auto* first = existing.front().as<EllipsoidQuadratic<double>>();
        if (!first) throw ConfigurationError("first set must be an ellipsoid");
        const VectorXd dir = axis / axis_norm;
        const double curvature = dir.dot(first->A * dir);
        const double chord = -2.0 * dir.dot(first->A * target + first->b) / curvature;
        const double room_in_second = axis_norm - axis_norm / lambda;
        const double step = 0.5 * std::min(chord, room_in_second);
        if (!(step > 0.0)) throw GenerationError("anchor has no room inside xi_1");
        new_anchor = target + step * dir;
    } else {
        new_anchor = *anchor;
    }
    return {ConvexSet<double>::ellipsoid(std::move(metric), std::move(b), c), new_anchor,
            std::move(rec)};
}

GeneratedInstance generate_instance(const EllipsoidGenConfig& config) {
    config.validate();
    Rng rng(config.seed);
    for (std::size_t attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        try {
            std::vector<ConvexSet<double>> sets;
            std::vector<EllipsoidRecord> log;
            EllipsoidRecord first;
            sets.push_back(generate_first_ellipsoid(config, rng, &first));
            log.push_back(std::move(first));
            std::optional<VectorXd> anchor;
            for (std::size_t i = 1; i < config.m; ++i) {
                auto next = generate_chained_ellipsoid(config, rng, i, sets, anchor);
                sets.push_back(std::move(next.set));
                log.push_back(std::move(next.record));
                anchor = std::move(next.anchor);
            }
            bool interior = true;
            for (const auto& s : sets) {
                if (!(evaluate_constraint(s, *anchor) < -kInteriorMargin)) {
                    interior = false;
                    break;
                }
            }
            if (!interior) continue;
            std::string id = "ellipsoids-n" + std::to_string(config.n) + "-m" +
                             std::to_string(config.m) + "-seed" + std::to_string(config.seed);
            FeasibilityProblem<double> problem(std::move(sets), *anchor, std::move(id));
            return GeneratedInstance{std::move(problem), *anchor, std::move(log), config, attempt};
        } catch (const GenerationError&) {
            continue;
        }
    }
    throw GenerationError("instance generation failed after " + std::to_string(kMaxAttempts) +
                          " attempts");
}

}  // namespace ccrm
