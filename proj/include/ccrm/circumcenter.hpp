#pragma once

#include "ccrm/convex_set.hpp"

#include <array>
#include <cmath>
#include <optional>

namespace ccrm {

/// The point of aff{p0, p1, p2} equidistant to p0, p1 and p2.
///
/// With u = p1 - p0 and v = p2 - p0 the circumcenter is p0 + alpha u + beta v where
///   [u.u u.v] [alpha]   [u.u / 2]
///   [u.v v.v] [beta ] = [v.v / 2].
/// Degenerate multisets: coincident points return that point; when the Gram matrix is
/// numerically rank deficient the midpoint of the farthest pair is returned if it is
/// equidistant to the third point, otherwise DegenerateConfiguration is thrown.
template <typename Scalar>
Vector<Scalar> circumcenter(const Vector<Scalar>& p0, const Vector<Scalar>& p1,
                            const Vector<Scalar>& p2) {
    check_dimension(p1, p0.size());
    check_dimension(p2, p0.size());
    const Vector<Scalar> u = p1 - p0;
    const Vector<Scalar> v = p2 - p0;
    const Scalar d01 = u.norm();
    const Scalar d02 = v.norm();
    const Scalar d12 = (p2 - p1).norm();
    const Scalar scale = std::max({d01, d02, d12});
    if (scale == Scalar(0)) return p0;

    const Scalar uu = u.squaredNorm();
    const Scalar vv = v.squaredNorm();
    const Scalar uv = u.dot(v);

    // eigenvalues of the symmetric positive semidefinite Gram matrix
    const Scalar half_gap = Scalar(0.5) * (uu - vv);
    const Scalar sigma_max = Scalar(0.5) * (uu + vv) + std::hypot(half_gap, uv);
    const Scalar sigma_min = std::max(Scalar(0), (uu * vv - uv * uv) / sigma_max);

    if (sigma_min <= Scalar(1e-12) * sigma_max) {
        const std::array<const Vector<Scalar>*, 3> pts{&p0, &p1, &p2};
        int i = 0, j = 1, k = 2;
        if (d02 >= d01 && d02 >= d12) {
            j = 2;
            k = 1;
        } else if (d12 >= d01 && d12 >= d02) {
            i = 1;
            j = 2;
            k = 0;
        }
        const Vector<Scalar> mid = Scalar(0.5) * (*pts[i] + *pts[j]);
        const Scalar radius = Scalar(0.5) * scale;
        if (std::abs((mid - *pts[k]).norm() - radius) <= Scalar(1e-9) * (Scalar(1) + scale)) {
            return mid;
        }
        throw DegenerateConfiguration("circumcenter of three distinct collinear points");
    }

    // 2x2 elimination with full pivoting
    Scalar m[2][2] = {{uu, uv}, {uv, vv}};
    Scalar rhs[2] = {Scalar(0.5) * uu, Scalar(0.5) * vv};
    int pr = 0, pc = 0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            if (std::abs(m[r][c]) > std::abs(m[pr][pc])) {
                pr = r;
                pc = c;
            }
        }
    }
    const int orow = 1 - pr;
    const int ocol = 1 - pc;
    const Scalar factor = m[orow][pc] / m[pr][pc];
    const Scalar reduced = m[orow][ocol] - factor * m[pr][ocol];
    const Scalar reduced_rhs = rhs[orow] - factor * rhs[pr];
    Scalar coef[2];
    coef[ocol] = reduced_rhs / reduced;
    coef[pc] = (rhs[pr] - m[pr][ocol] * coef[ocol]) / m[pr][pc];
    return p0 + coef[0] * u + coef[1] * v;
}

/// Z = P_A o P_B
template <typename Scalar>
Vector<Scalar> sequential_projection(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                                     const Vector<Scalar>& z) {
    return project(a, project(b, z));
}

/// Z~ = (P_A + P_B) / 2
template <typename Scalar>
Vector<Scalar> simultaneous_projection(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                                       const Vector<Scalar>& z) {
    return Scalar(0.5) * (project(a, z) + project(b, z));
}

namespace detail {

// Z-bar = Z~ o Z. Z lies in A, so P_A(Z) is Z itself and only P_B(Z) is evaluated.
template <typename Scalar>
Vector<Scalar> centralize(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                          const Vector<Scalar>& proj_b_of_z, std::size_t& evals) {
    const Vector<Scalar> y = project(a, proj_b_of_z);
    const Vector<Scalar> pby = project(b, y);
    evals += 2;
    return Scalar(0.5) * (y + pby);
}

template <typename Scalar>
Vector<Scalar> ccrm_step(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                         const Vector<Scalar>& proj_b_of_z, std::size_t& evals) {
    const Vector<Scalar> w = centralize(a, b, proj_b_of_z, evals);
    const Vector<Scalar> ra = reflect(a, w);
    const Vector<Scalar> rb = reflect(b, w);
    evals += 2;
    return circumcenter(w, ra, rb);
}

}  // namespace detail

/// Z-bar = Z~ o Z; the result is centralized with respect to (A, B).
template <typename Scalar>
Vector<Scalar> centralize(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                          const Vector<Scalar>& z) {
    std::size_t evals = 0;
    return detail::centralize(a, b, project(b, z), evals);
}

/// <R_A(z) - z, R_B(z) - z> <= tol * (1 + |R_A(z) - z| |R_B(z) - z|)
template <typename Scalar>
bool is_centralized(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                    const Vector<Scalar>& z, Scalar tol = Scalar(1e-10)) {
    if (!(tol >= Scalar(0))) throw InvalidArgument("centralization tolerance must be nonnegative");
    const Vector<Scalar> da = reflect(a, z) - z;
    const Vector<Scalar> db = reflect(b, z) - z;
    return da.dot(db) <= tol * (Scalar(1) + da.norm() * db.norm());
}

/// T(z) = circum(w, R_A(w), R_B(w)) with w = Z-bar(z).
template <typename Scalar>
Vector<Scalar> ccrm_operator(const ConvexSet<Scalar>& a, const ConvexSet<Scalar>& b,
                             const Vector<Scalar>& z) {
    std::size_t evals = 0;
    return detail::ccrm_step(a, b, project(b, z), evals);
}

/// Supporting halfspaces H_A, H_B at a centralized point; std::nullopt stands for R^n.
template <typename Scalar>
struct SupportingHalfspacePair {
    std::optional<ConvexSet<Scalar>> h_a;
    std::optional<ConvexSet<Scalar>> h_b;
    Vector<Scalar> at;
};

/// H = {x : <x - P(z), z - P(z)> <= 0}
template <typename Scalar>
std::optional<ConvexSet<Scalar>> supporting_halfspace(const ConvexSet<Scalar>& set,
                                                      const Vector<Scalar>& z) {
    const Vector<Scalar> p = project(set, z);
    Vector<Scalar> normal = z - p;
    if (normal.isZero(Scalar(0))) return std::nullopt;
    const Scalar offset = normal.dot(p);
    return ConvexSet<Scalar>::halfspace(std::move(normal), offset);
}

template <typename Scalar>
SupportingHalfspacePair<Scalar> supporting_halfspaces(const ConvexSet<Scalar>& a,
                                                      const ConvexSet<Scalar>& b,
                                                      const Vector<Scalar>& z) {
    return {supporting_halfspace(a, z), supporting_halfspace(b, z), z};
}

}  // namespace ccrm
