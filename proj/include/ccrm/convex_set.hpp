#pragma once

#include "ccrm/types.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace ccrm {

/// {x : <normal, x> <= offset}
template <typename Scalar>
struct Halfspace {
    Vector<Scalar> normal;
    Scalar offset{};
};

template <typename Scalar>
struct Ball {
    Vector<Scalar> center;
    Scalar radius{};
};

template <typename Scalar>
struct Box {
    Vector<Scalar> lower;
    Vector<Scalar> upper;
};

/// point + span(basis); the columns of basis are orthonormal.
template <typename Scalar>
struct AffineSubspace {
    Vector<Scalar> point;
    Matrix<Scalar> basis;
};

/// {x : x^T A x + 2 b^T x - c <= 0} with A symmetric positive definite.
///
/// The factory caches the spectral decomposition A = V diag(d) V^T together with
/// the center -A^{-1} b and the squared radius c + b^T A^{-1} b, so that the
/// projection works on (x - center)^T A (x - center) <= radius_sq.
template <typename Scalar>
struct EllipsoidQuadratic {
    Matrix<Scalar> A;
    Vector<Scalar> b;
    Scalar c{};

    Matrix<Scalar> eigenvectors;
    Vector<Scalar> eigenvalues;
    Vector<Scalar> center;
    Scalar radius_sq{};
};

/// {x : f(x) <= 0} for a user supplied convex f together with its projector.
template <typename Scalar>
struct SublevelConvex {
    std::function<Scalar(const Vector<Scalar>&)> value;
    std::function<Vector<Scalar>(const Vector<Scalar>&)> projector;
    Eigen::Index dimension{};
};

/// Options of the iterative ellipsoid projection.
template <typename Scalar>
struct EllipsoidProjectionOptions {
    Scalar tolerance = Scalar(1e-12);  // on |f(x)| / (1 + |c|)
    int max_iterations = 200;
};

/// An immutable closed convex set of R^n.
template <typename Scalar = double>
class ConvexSet {
    static_assert(std::floating_point<Scalar>);

public:
    using Shape = std::variant<Halfspace<Scalar>, Ball<Scalar>, Box<Scalar>, AffineSubspace<Scalar>,
                               EllipsoidQuadratic<Scalar>, SublevelConvex<Scalar>>;

    static ConvexSet halfspace(Vector<Scalar> normal, Scalar offset) {
        require_finite(normal, "halfspace normal");
        if (!std::isfinite(offset)) throw InvalidArgument("halfspace offset must be finite");
        if (normal.size() < 1) throw InvalidArgument("dimension must be at least 1");
        if (!(normal.norm() > Scalar(0))) throw InvalidArgument("halfspace normal must be nonzero");
        return ConvexSet(Halfspace<Scalar>{std::move(normal), offset});
    }

    static ConvexSet ball(Vector<Scalar> center, Scalar radius) {
        require_finite(center, "ball center");
        if (center.size() < 1) throw InvalidArgument("dimension must be at least 1");
        if (!(radius > Scalar(0)) || !std::isfinite(radius)) {
            throw InvalidArgument("ball radius must be positive and finite");
        }
        return ConvexSet(Ball<Scalar>{std::move(center), radius});
    }

    static ConvexSet box(Vector<Scalar> lower, Vector<Scalar> upper) {
        require_finite(lower, "box lower bound");
        require_finite(upper, "box upper bound");
        if (lower.size() < 1) throw InvalidArgument("dimension must be at least 1");
        check_dimension(upper, lower.size());
        if ((lower.array() > upper.array()).any()) {
            throw InvalidArgument("box requires lower <= upper componentwise");
        }
        return ConvexSet(Box<Scalar>{std::move(lower), std::move(upper)});
    }

    /// Directions need not be orthonormal or independent; they are orthonormalized
    /// by two passes of modified Gram-Schmidt and dependent columns are dropped.
    static ConvexSet affine_subspace(Vector<Scalar> point, const Matrix<Scalar>& directions) {
        require_finite(point, "affine point");
        if (point.size() < 1) throw InvalidArgument("dimension must be at least 1");
        if (directions.rows() != point.size() && directions.cols() > 0) {
            throw DimensionMismatch(static_cast<std::size_t>(point.size()),
                                    static_cast<std::size_t>(directions.rows()));
        }
        if (!directions.allFinite()) throw InvalidArgument("affine directions must be finite");
        return ConvexSet(AffineSubspace<Scalar>{std::move(point), orthonormalize(directions)});
    }

    static ConvexSet ellipsoid(Matrix<Scalar> A, Vector<Scalar> b, Scalar c) {
        const Eigen::Index n = A.rows();
        if (n < 1 || A.cols() != n) throw InvalidArgument("ellipsoid matrix must be square");
        check_dimension(b, n);
        if (!A.allFinite() || !b.allFinite() || !std::isfinite(c)) {
            throw InvalidArgument("ellipsoid data must be finite");
        }
        const Scalar scale = std::max(Scalar(1), A.cwiseAbs().maxCoeff());
        if ((A - A.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
            throw InvalidArgument("ellipsoid matrix is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(
            (A + A.transpose()) * Scalar(0.5), Eigen::ComputeEigenvectors);
        if (eig.info() != Eigen::Success) throw InvalidArgument("ellipsoid eigensolve failed");
        if (!(eig.eigenvalues().minCoeff() > Scalar(0))) {
            throw InvalidArgument("ellipsoid matrix is not positive definite");
        }
        EllipsoidQuadratic<Scalar> e;
        e.eigenvectors = eig.eigenvectors();
        e.eigenvalues = eig.eigenvalues();
        e.center = -(e.eigenvectors *
                     (e.eigenvectors.transpose() * b).cwiseQuotient(e.eigenvalues));
        e.radius_sq = c - b.dot(e.center);
        if (!(e.radius_sq > Scalar(0))) {
            throw InvalidArgument("ellipsoid has empty interior (c + b^T A^{-1} b <= 0)");
        }
        e.A = std::move(A);
        e.b = std::move(b);
        e.c = c;
        return ConvexSet(std::move(e));
    }

    static ConvexSet sublevel(Eigen::Index dimension,
                              std::function<Scalar(const Vector<Scalar>&)> value,
                              std::function<Vector<Scalar>(const Vector<Scalar>&)> projector) {
        if (dimension < 1) throw InvalidArgument("dimension must be at least 1");
        if (!value || !projector) throw InvalidArgument("sublevel set needs value and projector");
        return ConvexSet(SublevelConvex<Scalar>{std::move(value), std::move(projector), dimension});
    }

    Eigen::Index dimension() const {
        return std::visit(
            [](const auto& s) -> Eigen::Index {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Halfspace<Scalar>>) return s.normal.size();
                else if constexpr (std::is_same_v<T, Ball<Scalar>>) return s.center.size();
                else if constexpr (std::is_same_v<T, Box<Scalar>>) return s.lower.size();
                else if constexpr (std::is_same_v<T, AffineSubspace<Scalar>>) return s.point.size();
                else if constexpr (std::is_same_v<T, EllipsoidQuadratic<Scalar>>) return s.b.size();
                else return s.dimension;
            },
            shape_);
    }

    const Shape& shape() const noexcept { return shape_; }

    std::string_view kind_name() const noexcept {
        constexpr std::string_view names[] = {"halfspace", "ball",      "box",
                                              "affine",    "ellipsoid", "sublevel"};
        return names[shape_.index()];
    }

    /// False only for affine subspaces, which have no scalar defining function.
    bool has_defining_function() const noexcept {
        return !std::holds_alternative<AffineSubspace<Scalar>>(shape_);
    }

    template <typename T>
    const T* as() const noexcept {
        return std::get_if<T>(&shape_);
    }

private:
    explicit ConvexSet(Shape shape) : shape_(std::move(shape)) {}

    static void require_finite(const Vector<Scalar>& v, const char* what) {
        if (!v.allFinite()) throw InvalidArgument(std::string(what) + " must be finite");
    }

    static Matrix<Scalar> orthonormalize(const Matrix<Scalar>& directions) {
        const Eigen::Index n = directions.rows();
        Matrix<Scalar> q(n, 0);
        if (directions.cols() == 0) return q;
        const Scalar scale = directions.colwise().norm().maxCoeff();
        for (Eigen::Index j = 0; j < directions.cols(); ++j) {
            Vector<Scalar> v = directions.col(j);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i < q.cols(); ++i) v -= q.col(i).dot(v) * q.col(i);
            }
            const Scalar norm = v.norm();
            if (norm <= Scalar(1e-12) * scale) continue;
            q.conservativeResize(n, q.cols() + 1);
            q.col(q.cols() - 1) = v / norm;
        }
        return q;
    }

    Shape shape_;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> project_ellipsoid(const EllipsoidQuadratic<Scalar>& e, const Vector<Scalar>& z,
                                 const EllipsoidProjectionOptions<Scalar>& opts) {
    const Scalar fz = z.dot(e.A * z) + Scalar(2) * e.b.dot(z) - e.c;
    if (fz <= Scalar(0)) return z;

    // In the eigenbasis, x(lambda) = center + V (s ./ (1 + lambda d)) with s = V^T (z - center)
    // solves (I + lambda A) x = z - lambda b. The root of
    //   phi(lambda) = sum d_j s_j^2 / (1 + lambda d_j)^2 - radius_sq
    // is found by Newton on the nearly linear 1/sqrt(phi + radius_sq) with a bisection safeguard.
    const Vector<Scalar>& d = e.eigenvalues;
    const Vector<Scalar> s = e.eigenvectors.transpose() * (z - e.center);
    const Scalar rho = e.radius_sq;
    const Scalar tol = opts.tolerance * (Scalar(1) + std::abs(e.c));

    auto secular = [&](Scalar lambda, Scalar& q, Scalar& dq) {
        q = Scalar(0);
        dq = Scalar(0);
        for (Eigen::Index j = 0; j < d.size(); ++j) {
            const Scalar den = Scalar(1) + lambda * d[j];
            const Scalar t = d[j] * s[j] * s[j] / (den * den);
            q += t;
            dq -= Scalar(2) * t * d[j] / den;
        }
    };

    Scalar lo = Scalar(0);
    // d s^2 / (1 + lambda d)^2 <= s^2 / (lambda^2 d) bounds the root from above.
    Scalar hi = std::sqrt((s.array().square() / d.array()).sum() / rho);
    hi = std::max(hi, std::numeric_limits<Scalar>::min());
    Scalar lambda = lo;
    Scalar phi = std::numeric_limits<Scalar>::infinity();
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Scalar q, dq;
        secular(lambda, q, dq);
        phi = q - rho;
        if (std::abs(phi) <= tol) {
            converged = true;
            break;
        }
        if (phi > Scalar(0)) lo = std::max(lo, lambda);
        else hi = std::min(hi, lambda);
        if (hi - lo <= Scalar(4) * std::numeric_limits<Scalar>::epsilon() * hi) {
            converged = true;
            break;
        }
        // psi(lambda) = 1/sqrt(rho) - 1/sqrt(q), psi' = q'/(2 q^{3/2})
        Scalar next = lo;
        if (q > Scalar(0) && dq < Scalar(0)) {
            const Scalar psi = Scalar(1) / std::sqrt(rho) - Scalar(1) / std::sqrt(q);
            const Scalar dpsi = dq / (Scalar(2) * q * std::sqrt(q));
            next = lambda - psi / dpsi;
        }
        if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
        lambda = next;
    }
    if (!converged) {
        throw ProjectionFailure("ellipsoid projection did not converge",
                                static_cast<double>(std::abs(phi)));
    }
    return e.center + e.eigenvectors * s.cwiseQuotient(
                                           (Vector<Scalar>::Ones(d.size()) + lambda * d));
}

}  // namespace detail

/// Orthogonal projection onto the set.
template <typename Scalar>
Vector<Scalar> project(const ConvexSet<Scalar>& set, const Vector<Scalar>& z,
                       const EllipsoidProjectionOptions<Scalar>& opts = {}) {
    check_dimension(z, set.dimension());
    return std::visit(
        [&](const auto& s) -> Vector<Scalar> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Halfspace<Scalar>>) {
                const Scalar excess = s.normal.dot(z) - s.offset;
                if (excess <= Scalar(0)) return z;
                return z - (excess / s.normal.squaredNorm()) * s.normal;
            } else if constexpr (std::is_same_v<T, Ball<Scalar>>) {
                const Vector<Scalar> offset = z - s.center;
                const Scalar dist = offset.norm();
                if (dist <= s.radius) return z;
                return s.center + (s.radius / dist) * offset;
            } else if constexpr (std::is_same_v<T, Box<Scalar>>) {
                return z.cwiseMax(s.lower).cwiseMin(s.upper);
            } else if constexpr (std::is_same_v<T, AffineSubspace<Scalar>>) {
                return s.point + s.basis * (s.basis.transpose() * (z - s.point));
            } else if constexpr (std::is_same_v<T, EllipsoidQuadratic<Scalar>>) {
                return detail::project_ellipsoid(s, z, opts);
            } else {
                Vector<Scalar> p = s.projector(z);
                check_dimension(p, s.dimension);
                return p;
            }
        },
        set.shape());
}

/// R = 2P - Id
template <typename Scalar>
Vector<Scalar> reflect(const ConvexSet<Scalar>& set, const Vector<Scalar>& z) {
    return Scalar(2) * project(set, z) - z;
}

/// Convex f with {f <= 0} equal to the set. Balls use |z - c| - r and boxes the largest
/// bound violation; affine subspaces have none and raise ConfigurationError.
template <typename Scalar>
Scalar evaluate_constraint(const ConvexSet<Scalar>& set, const Vector<Scalar>& z) {
    check_dimension(z, set.dimension());
    return std::visit(
        [&](const auto& s) -> Scalar {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Halfspace<Scalar>>) {
                return s.normal.dot(z) - s.offset;
            } else if constexpr (std::is_same_v<T, Ball<Scalar>>) {
                return (z - s.center).norm() - s.radius;
            } else if constexpr (std::is_same_v<T, Box<Scalar>>) {
                return std::max((s.lower - z).maxCoeff(), (z - s.upper).maxCoeff());
            } else if constexpr (std::is_same_v<T, AffineSubspace<Scalar>>) {
                throw ConfigurationError(
                    "affine subspace has no scalar defining function; use the distance instead");
            } else if constexpr (std::is_same_v<T, EllipsoidQuadratic<Scalar>>) {
                return z.dot(s.A * z) + Scalar(2) * s.b.dot(z) - s.c;
            } else {
                return s.value(z);
            }
        },
        set.shape());
}

/// Residual test: f(z) <= tol for halfspaces, ellipsoids and sublevel sets,
/// |z - P(z)| <= tol for the others.
template <typename Scalar>
bool membership(const ConvexSet<Scalar>& set, const Vector<Scalar>& z, Scalar tol) {
    if (!(tol >= Scalar(0))) throw InvalidArgument("membership tolerance must be nonnegative");
    check_dimension(z, set.dimension());
    const auto& shape = set.shape();
    if (std::holds_alternative<Halfspace<Scalar>>(shape) ||
        std::holds_alternative<EllipsoidQuadratic<Scalar>>(shape) ||
        std::holds_alternative<SublevelConvex<Scalar>>(shape)) {
        return evaluate_constraint(set, z) <= tol;
    }
    return (z - project(set, z)).norm() <= tol;
}

template <typename Scalar>
Scalar distance(const ConvexSet<Scalar>& set, const Vector<Scalar>& z) {
    return (z - project(set, z)).norm();
}

}  // namespace ccrm
