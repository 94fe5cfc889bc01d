#pragma once

#include "ccrm/problem.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace ccrm {

using Rng = std::mt19937_64;

struct EllipsoidGenConfig {
    std::size_t n = 10;
    std::size_t m = 3;
    double gamma = 1.0;
    double lambda_scale = 1.01;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Parameters used to build one ellipsoid. The first ellipsoid is stored in quadratic
/// form (A, b, c) together with its sparse factor; the others in center form with
/// (x - center)^T (S^T S)^{-1} (x - center) <= 1, S = Q diag(semi_axes) Q^T.
struct EllipsoidRecord {
    std::size_t index = 0;
    MatrixXd factor;      // B_1, first ellipsoid only
    MatrixXd A;           // A_1, or S for the chained ellipsoids
    VectorXd b;
    double c = 0.0;
    VectorXd center;
    VectorXd axis;        // d_i, the longest semi-axis
    MatrixXd rotation;    // Q_i
    VectorXd semi_axes;   // diagonal of Lambda_i
    std::size_t center_draws = 0;
};

/// (x - center)^T (S^T S)^{-1} (x - center) - 1 for a chained ellipsoid record.
double center_form_value(const EllipsoidRecord& record, const VectorXd& x);

/// xi_1 = {x^T A x + 2 b^T x - c <= 0}, A = gamma I + B^T B with B sparse of density 2/n,
/// b uniform on [0, 1]^n and c = 2 b^T A b + 1 so that f(0) = -c < 0.
ConvexSet<double> generate_first_ellipsoid(const EllipsoidGenConfig& config, Rng& rng,
                                           EllipsoidRecord* record = nullptr);

struct ChainedEllipsoid {
    ConvexSet<double> set;
    VectorXd anchor;
    EllipsoidRecord record;
};

/// Ellipsoid at 0-based position index >= 1, centered outside all existing sets, whose longest
/// semi-axis d_i points towards the projection of the center onto xi_1 (index 1) or
/// towards the anchor (index >= 2), scaled by lambda.
ChainedEllipsoid generate_chained_ellipsoid(const EllipsoidGenConfig& config, Rng& rng,
                                            std::size_t index,
                                            const std::vector<ConvexSet<double>>& existing,
                                            const std::optional<VectorXd>& anchor);

struct GeneratedInstance {
    FeasibilityProblem<double> problem;
    VectorXd common_point;
    std::vector<EllipsoidRecord> log;
    EllipsoidGenConfig config;
    std::size_t attempts = 1;
};

/// m ellipsoids with a certified common point p satisfying f_i(p) < 0 for every i.
/// Deterministic in the config; failed attempts are redrawn from the same stream.
GeneratedInstance generate_instance(const EllipsoidGenConfig& config);

/// Orthogonal Q with first column direction / |direction| (Householder reflector).
MatrixXd householder_with_first_column(const VectorXd& direction);

/// Uniform point of [-100, 100]^n.
VectorXd sample_box_point(Rng& rng, std::size_t n);

}  // namespace ccrm
