#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccrm/convex_set.hpp"
#include "oracles.hpp"

#include <limits>

using ccrm::ConvexSet;
using ccrm::MatrixXd;
using ccrm::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
    VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

ConvexSet<double> unit_ball_quadratic() {
    return ConvexSet<double>::ellipsoid(MatrixXd::Identity(2, 2), VectorXd::Zero(2), 1.0);
}

}  // namespace

TEST_CASE("halfspace projection is closed form") {
    const auto h = ConvexSet<double>::halfspace(vec({1, 0}), 0.0);
    CHECK(ccrm::project(h, vec({2, 3})).isApprox(vec({0, 3})));
    CHECK(ccrm::project(h, vec({-1, 3})) == vec({-1, 3}));
}

TEST_CASE("unit ball in quadratic form projects radially") {
    const auto e = unit_ball_quadratic();
    CHECK((ccrm::project(e, vec({2, 0})) - vec({1, 0})).norm() < 1e-12);
}

TEST_CASE("ellipsoid projection agrees with the bisection oracle") {
    MatrixXd A = vec({1, 4}).asDiagonal();
    const auto e = ConvexSet<double>::ellipsoid(A, VectorXd::Zero(2), 1.0);
    const VectorXd z = vec({2, 2});
    const VectorXd p = ccrm::project(e, z);
    const VectorXd ref = oracle::ellipsoid_projection(A, VectorXd::Zero(2), 1.0, z);
    CHECK((p - ref).norm() <= 1e-8);
    CHECK(std::abs(ccrm::evaluate_constraint(e, p)) < 1e-10);
}

TEST_CASE("ellipsoid projection leaves interior points untouched") {
    oracle::Rng rng(3);
    const MatrixXd A = oracle::random_spd(rng, 4);
    const VectorXd c = oracle::gaussian(rng, 4);
    const auto e = oracle::ellipsoid_from_center(A, c, 2.0);
    const VectorXd inside = c + 0.1 * oracle::gaussian(rng, 4) / std::sqrt(5.0);
    REQUIRE(ccrm::evaluate_constraint(e, inside) <= 0.0);
    CHECK(ccrm::project(e, inside) == inside);
}

TEST_CASE("ellipsoid projection over random shapes and offsets") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = 1 + trial % 12;
        const MatrixXd A = oracle::random_spd(rng, n, 1e-2, 1e2);
        const VectorXd c = oracle::gaussian(rng, n, 3.0);
        const auto e = oracle::ellipsoid_from_center(A, c, oracle::uniform(rng, 0.1, 10.0));
        const auto* q = e.as<ccrm::EllipsoidQuadratic<double>>();
        const VectorXd z = c + oracle::gaussian(rng, n, 20.0);
        const VectorXd p = ccrm::project(e, z);
        CHECK((p - oracle::ellipsoid_projection(q->A, q->b, q->c, z)).norm() <= 1e-8 * (1 + z.norm()));
    }
}

TEST_CASE("ellipsoid projection reports non-convergence") {
    MatrixXd A = vec({1, 1e4}).asDiagonal();
    const auto e = ConvexSet<double>::ellipsoid(A, VectorXd::Zero(2), 1.0);
    ccrm::EllipsoidProjectionOptions<double> opts;
    opts.max_iterations = 1;
    CHECK_THROWS_AS(ccrm::project(e, vec({50, 50}), opts), ccrm::ProjectionFailure);
}

TEST_CASE("reflection examples") {
    const auto h = ConvexSet<double>::halfspace(vec({1, 0}), 0.0);
    CHECK(ccrm::reflect(h, vec({2, 0})).isApprox(vec({-2, 0})));
    CHECK(ccrm::reflect(h, vec({-3, 1})) == vec({-3, 1}));
    const auto b = ConvexSet<double>::ball(vec({0, 0}), 1.0);
    CHECK(ccrm::reflect(b, vec({3, 0})).isApprox(vec({-1, 0})));
}

TEST_CASE("membership examples") {
    const auto b = unit_ball_quadratic();
    CHECK(ccrm::membership(b, vec({0, 0}), 0.0));
    CHECK_FALSE(ccrm::membership(b, vec({2, 0}), 0.0));
    const auto h = ConvexSet<double>::halfspace(vec({1, 0}), 1.0);
    CHECK(ccrm::membership(h, vec({1 + 1e-12, 0}), 1e-10));
    CHECK_THROWS_AS(ccrm::membership(h, vec({0, 0}), -1.0), ccrm::InvalidArgument);
}

TEST_CASE("constraint values") {
    CHECK(ccrm::evaluate_constraint(unit_ball_quadratic(), vec({2, 0})) == doctest::Approx(3.0));
    CHECK(ccrm::evaluate_constraint(ConvexSet<double>::halfspace(vec({1, 0}), 2.0), vec({5, 0})) ==
          doctest::Approx(3.0));
    MatrixXd A = vec({2, 1}).asDiagonal();
    const auto e = ConvexSet<double>::ellipsoid(A, vec({1, 0}), 4.0);
    CHECK(ccrm::evaluate_constraint(e, vec({1, 1})) == doctest::Approx(1.0));
    // an affine subspace has no defining function
    const auto aff = ConvexSet<double>::affine_subspace(vec({0, 0}), MatrixXd(vec({1, 0})));
    CHECK_FALSE(aff.has_defining_function());
    CHECK_THROWS_AS(ccrm::evaluate_constraint(aff, vec({1, 1})), ccrm::ConfigurationError);
}

TEST_CASE("construction rejects invalid descriptors") {
    MatrixXd asym(2, 2);
    asym << 1, 0.5, 0, 1;
    CHECK_THROWS_AS(ConvexSet<double>::ellipsoid(asym, VectorXd::Zero(2), 1.0), ccrm::InvalidArgument);
    MatrixXd indefinite = vec({1, -1}).asDiagonal();
    CHECK_THROWS_AS(ConvexSet<double>::ellipsoid(indefinite, VectorXd::Zero(2), 1.0), ccrm::InvalidArgument);
    // empty ellipsoid: c + b'A^{-1}b <= 0
    CHECK_THROWS_AS(ConvexSet<double>::ellipsoid(MatrixXd::Identity(2, 2), VectorXd::Zero(2), -1.0),
                    ccrm::InvalidArgument);
    CHECK_THROWS_AS(ConvexSet<double>::box(vec({0, 1}), vec({1, 0})), ccrm::InvalidArgument);
    CHECK_THROWS_AS(ConvexSet<double>::halfspace(vec({0, 0}), 1.0), ccrm::InvalidArgument);
    CHECK_THROWS_AS(ConvexSet<double>::ball(vec({0, 0}), -1.0), ccrm::InvalidArgument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ConvexSet<double>::halfspace(vec({1, nan}), 1.0), ccrm::InvalidArgument);
    CHECK_THROWS_AS(ConvexSet<double>::halfspace(VectorXd(0), 1.0), ccrm::InvalidArgument);
    const auto h = ConvexSet<double>::halfspace(vec({1, 0}), 0.0);
    CHECK_THROWS_AS(ccrm::project(h, vec({1, 2, 3})), ccrm::DimensionMismatch);
}

TEST_CASE("symmetry check is relative to the matrix scale") {
    MatrixXd A(2, 2);
    A << 1e6, 1e-8, 0, 1e6;  // asymmetry 1e-8 against 1e-12 * 1e6 = 1e-6
    CHECK_NOTHROW(ConvexSet<double>::ellipsoid(A, VectorXd::Zero(2), 1.0));
}

TEST_CASE("affine subspace keeps an orthonormal basis of the span") {
    MatrixXd D(3, 3);
    D << 1, 2, 0,
         1, 2, 0,
         0, 0, 1;  // second column repeats the first
    const auto aff = ConvexSet<double>::affine_subspace(vec({1, 1, 1}), D);
    const auto* s = aff.as<ccrm::AffineSubspace<double>>();
    REQUIRE(s->basis.cols() == 2);
    CHECK((s->basis.transpose() * s->basis - MatrixXd::Identity(2, 2)).norm() < 1e-14);
    CHECK(ccrm::project(aff, vec({3, 1, 5})).isApprox(vec({2, 2, 5})));
    // zero-dimensional subspace is the point itself
    const auto pt = ConvexSet<double>::affine_subspace(vec({1, 2}), MatrixXd(2, 0));
    CHECK(ccrm::project(pt, vec({7, -3})) == vec({1, 2}));
}

TEST_CASE("box and ball closed forms") {
    const auto box = ConvexSet<double>::box(vec({-1, -1}), vec({1, 2}));
    CHECK(ccrm::project(box, vec({3, -5})) == vec({1, -1}));
    CHECK(ccrm::evaluate_constraint(box, vec({3, 0})) == doctest::Approx(2.0));
    CHECK(ccrm::distance(box, vec({3, 0})) == doctest::Approx(2.0));
    const auto ball = ConvexSet<double>::ball(vec({1, 1}), 2.0);
    CHECK(ccrm::evaluate_constraint(ball, vec({1, 5})) == doctest::Approx(2.0));
    CHECK(ccrm::project(ball, vec({1, 5})).isApprox(vec({1, 3})));
}

TEST_CASE("sublevel sets use the supplied projector") {
    // |x|_inf <= 1 written as a sublevel set
    const auto s = ConvexSet<double>::sublevel(
        2, [](const VectorXd& x) { return x.cwiseAbs().maxCoeff() - 1.0; },
        [](const VectorXd& x) { return VectorXd(x.cwiseMax(-1.0).cwiseMin(1.0)); });
    CHECK(s.kind_name() == "sublevel");
    CHECK(ccrm::project(s, vec({3, 0.5})) == vec({1, 0.5}));
    CHECK(ccrm::evaluate_constraint(s, vec({3, 0.5})) == doctest::Approx(2.0));
    CHECK(ccrm::membership(s, vec({0.5, 0.5}), 0.0));
}

TEST_CASE("projection properties on random sets") {
    oracle::Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index n = 1 + trial % 8;
        const VectorXd s = oracle::gaussian(rng, n);
        const auto set = oracle::random_set_through(rng, oracle::random_kind(rng), s);
        const VectorXd x = oracle::gaussian(rng, n, 4.0);
        const VectorXd y = oracle::gaussian(rng, n, 4.0);
        const VectorXd px = ccrm::project(set, x);
        const VectorXd py = ccrm::project(set, y);
        CAPTURE(set.kind_name());
        // nonexpansive
        CHECK((px - py).norm() <= (x - y).norm() + 1e-10);
        // Pythagoras-type inequality against a member
        const double lhs = (px - x).squaredNorm() + (px - s).squaredNorm();
        CHECK(lhs <= (x - s).squaredNorm() + 1e-8 * (1 + (x - s).squaredNorm()));
        // obtuse angle
        CHECK((x - px).dot(s - px) <= 1e-10 * (1 + (x - px).norm() * (s - px).norm()));
        // idempotent
        CHECK((ccrm::project(set, px) - px).norm() <= 1e-9 * (1 + px.norm()));
    }
}

TEST_CASE("reflection through an affine subspace is an involution") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + trial % 6;
        const auto aff = oracle::random_set_through(rng, oracle::Kind::Affine, oracle::gaussian(rng, n));
        const VectorXd z = oracle::gaussian(rng, n, 5.0);
        CHECK((ccrm::reflect(aff, ccrm::reflect(aff, z)) - z).norm() <= 1e-10 * (1 + z.norm()));
    }
}

TEST_CASE("long double instantiation") {
    using LV = ccrm::Vector<long double>;
    using LM = ccrm::Matrix<long double>;
    LM A = LM::Identity(2, 2);
    A(1, 1) = 4;
    const auto e = ConvexSet<long double>::ellipsoid(A, LV::Zero(2), 1.0L);
    LV z(2);
    z << 2, 2;
    ccrm::EllipsoidProjectionOptions<long double> opts;
    opts.tolerance = 1e-17L;
    const LV p = ccrm::project(e, z, opts);
    const VectorXd ref = oracle::ellipsoid_projection(A.cast<double>(), VectorXd::Zero(2), 1.0, vec({2, 2}));
    CHECK((p.cast<double>() - ref).norm() < 1e-12);
    CHECK(std::abs(ccrm::evaluate_constraint(e, p)) < 1e-15L);
}
