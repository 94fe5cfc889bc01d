#pragma once

#include "ccrm/circumcenter.hpp"
#include "ccrm/controls.hpp"
#include "ccrm/problem.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccrm {

enum class Method { CCRM, SEPM, SIPM, CRM_P };

inline std::string_view to_string(Method method) {
    switch (method) {
        case Method::CCRM: return "ccrm";
        case Method::SEPM: return "sepm";
        case Method::SIPM: return "sipm";
        case Method::CRM_P: return "crm-p";
    }
    return "?";
}

inline Method parse_method(std::string_view name) {
    if (name == "ccrm") return Method::CCRM;
    if (name == "sepm") return Method::SEPM;
    if (name == "sipm") return Method::SIPM;
    if (name == "crm-p") return Method::CRM_P;
    throw ConfigurationError("unknown method '" + std::string(name) + "'");
}

enum class Termination { StepSmall, ResidualSmall, IterLimit };

inline std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::StepSmall: return "step-small";
        case Termination::ResidualSmall: return "residual-small";
        case Termination::IterLimit: return "iter-limit";
    }
    return "?";
}

struct SolverConfig {
    Method method = Method::CCRM;
    ControlKind control = ControlKind::MostViolatedDistance;  // cCRM only
    double epsilon = 1e-6;
    std::size_t max_iter = 3000;
    std::uint64_t seed = 0;
    bool record_iterates = false;
    /// Also stop when |x^{k+1} - x^k| <= epsilon. Off means the run ends only on
    /// e_k <= epsilon or the iteration cap.
    bool step_test = true;

    void validate() const {
        if (!(epsilon > 0.0)) throw ConfigurationError("epsilon must be positive");
        if (max_iter < 1) throw ConfigurationError("max_iter must be at least 1");
    }
};

/// Per-iteration record of a run. Index k of residuals, projection_evals, elapsed_s and
/// iterates refers to x^k (k = 0..K); step_norms[k] is |x^{k+1} - x^k| (k = 0..K-1).
template <typename Scalar>
struct IterationTrace {
    std::vector<Vector<Scalar>> iterates;
    std::vector<double> residuals;
    std::vector<double> step_norms;
    std::vector<std::size_t> projection_evals;  // cumulative, algorithmic only
    std::vector<double> elapsed_s;
    std::vector<SelectionRecord> selections;
    std::size_t diagnostic_projection_evals = 0;  // spent on e_k
    double wall_time_s = 0.0;
    Termination termination = Termination::IterLimit;
    Vector<Scalar> final_iterate;

    std::size_t iterations() const noexcept { return step_norms.size(); }
    double final_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

/// A projection failed mid-run; the trace up to the failing iteration is attached.
template <typename Scalar>
class SolveFailure : public Error {
public:
    SolveFailure(const Error& cause, IterationTrace<Scalar> partial)
        : Error("solve aborted: " + std::string(cause.what())),
          cause_kind_(cause.kind()),
          trace_(std::move(partial)) {}
    const char* kind() const noexcept override { return "solve_failure"; }
    const std::string& cause_kind() const noexcept { return cause_kind_; }
    const IterationTrace<Scalar>& trace() const noexcept { return trace_; }

private:
    std::string cause_kind_;
    IterationTrace<Scalar> trace_;
};

/// A point of R^{nm}, one column per block.
template <typename Scalar>
struct ProductPoint {
    Matrix<Scalar> blocks;

    static ProductPoint diagonal(const Vector<Scalar>& x, std::size_t m) {
        return {x.replicate(1, static_cast<Eigen::Index>(m))};
    }
    Vector<Scalar> block_average() const { return blocks.rowwise().mean(); }
    /// Projection onto the diagonal subspace D: every block becomes the average.
    ProductPoint project_diagonal() const {
        return {block_average().replicate(1, blocks.cols())};
    }
    std::size_t block_count() const noexcept { return static_cast<std::size_t>(blocks.cols()); }
};

namespace detail {

template <typename Scalar>
Vector<Scalar> sepm_step(const FeasibilityProblem<Scalar>& problem, const Vector<Scalar>& x,
                         std::size_t& evals) {
    Vector<Scalar> y = x;
    for (const auto& s : problem.sets()) y = project(s, y);
    evals += problem.size();
    return y;
}

template <typename Scalar>
Vector<Scalar> sipm_step(const FeasibilityProblem<Scalar>& problem, const Vector<Scalar>& x,
                         std::size_t& evals) {
    Vector<Scalar> sum = Vector<Scalar>::Zero(x.size());
    for (const auto& s : problem.sets()) sum += project(s, x);
    evals += problem.size();
    return sum / Scalar(problem.size());
}

template <typename Scalar>
ProductPoint<Scalar> crmp_step(const FeasibilityProblem<Scalar>& problem,
                               const ProductPoint<Scalar>& zp, std::size_t& evals) {
    const Eigen::Index n = problem.dimension();
    const auto m = static_cast<Eigen::Index>(problem.size());
    if (zp.blocks.rows() != n || zp.blocks.cols() != m) {
        throw DimensionMismatch(static_cast<std::size_t>(n * m),
                                static_cast<std::size_t>(zp.blocks.size()));
    }
    Matrix<Scalar> reflected_w(n, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Vector<Scalar> zi = zp.blocks.col(i);
        reflected_w.col(i) = Scalar(2) * project(problem.set(static_cast<std::size_t>(i)), zi) - zi;
    }
    evals += problem.size();
    const Vector<Scalar> avg = reflected_w.rowwise().mean();
    const Matrix<Scalar> reflected_d = Scalar(2) * avg.replicate(1, m) - reflected_w;

    using Flat = Eigen::Map<const Vector<Scalar>>;
    const Vector<Scalar> c = circumcenter<Scalar>(Flat(zp.blocks.data(), n * m),
                                                  Flat(reflected_w.data(), n * m),
                                                  Flat(reflected_d.data(), n * m));
    return {Eigen::Map<const Matrix<Scalar>>(c.data(), n, m)};
}

template <typename Scalar>
std::pair<Vector<Scalar>, SelectionRecord> ccrm_step(const FeasibilityProblem<Scalar>& problem,
                                                     const ControlPolicy& policy,
                                                     const Vector<Scalar>& x, std::size_t k,
                                                     std::size_t& evals) {
    auto sel = select(policy, problem, x, k);
    evals += sel.projections;
    const auto& a = problem.set(sel.record.ell);
    const auto& b = problem.set(sel.record.r);
    Vector<Scalar> proj_b;
    if (sel.proj_r_of_x) {
        proj_b = std::move(*sel.proj_r_of_x);
    } else {
        proj_b = project(b, x);
        ++evals;
    }
    Vector<Scalar> next = detail::ccrm_step(a, b, proj_b, evals);
    return {std::move(next), std::move(sel.record)};
}

}  // namespace detail

/// One sequential projection sweep P_m o ... o P_1 (P_1 applied first).
template <typename Scalar>
Vector<Scalar> sepm_step(const FeasibilityProblem<Scalar>& problem, const Vector<Scalar>& x) {
    check_dimension(x, problem.dimension());
    std::size_t evals = 0;
    return detail::sepm_step(problem, x, evals);
}

/// Average of the m projections.
template <typename Scalar>
Vector<Scalar> sipm_step(const FeasibilityProblem<Scalar>& problem, const Vector<Scalar>& x) {
    check_dimension(x, problem.dimension());
    std::size_t evals = 0;
    return detail::sipm_step(problem, x, evals);
}

/// CRM on W = C_1 x ... x C_m and the diagonal D of R^{nm}: circum(z, R_W z, R_D R_W z).
template <typename Scalar>
ProductPoint<Scalar> crmp_step(const FeasibilityProblem<Scalar>& problem,
                               const ProductPoint<Scalar>& zp) {
    std::size_t evals = 0;
    return detail::crmp_step(problem, zp, evals);
}

/// x^{k+1} = T_{C_ell(k), C_r(k)}(x^k)
template <typename Scalar>
std::pair<Vector<Scalar>, SelectionRecord> ccrm_step(const FeasibilityProblem<Scalar>& problem,
                                                     const ControlPolicy& policy,
                                                     const Vector<Scalar>& x, std::size_t k) {
    policy.validate(problem);
    std::size_t evals = 0;
    return detail::ccrm_step(problem, policy, x, k, evals);
}

/// Runs the configured method from x0 until |x^{k+1} - x^k| <= eps, e_k <= eps or
/// k = max_iter. e_k is evaluated on every iterate, x^0 included; those projections are
/// tallied in diagnostic_projection_evals.
template <typename Scalar>
IterationTrace<Scalar> solve(const FeasibilityProblem<Scalar>& problem, const SolverConfig& config,
                             const Vector<Scalar>& x0) {
    config.validate();
    check_dimension(x0, problem.dimension());
    if (!x0.allFinite()) throw InvalidArgument("x0 must be finite");

    std::optional<ControlPolicy> policy;
    if (config.method == Method::CCRM) policy = ControlPolicy::make(config.control, problem);

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto seconds = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    IterationTrace<Scalar> trace;
    const auto eps = static_cast<double>(config.epsilon);
    const std::size_t m = problem.size();
    std::size_t evals = 0;
    Vector<Scalar> x = x0;
    ProductPoint<Scalar> zp;
    if (config.method == Method::CRM_P) zp = ProductPoint<Scalar>::diagonal(x0, m);

    auto record_state = [&](const Vector<Scalar>& xk) {
        trace.residuals.push_back(static_cast<double>(residual(problem, xk)));
        trace.diagnostic_projection_evals += m;
        trace.projection_evals.push_back(evals);
        trace.elapsed_s.push_back(seconds());
        if (config.record_iterates) trace.iterates.push_back(xk);
    };

    try {
        record_state(x);
        if (trace.residuals.back() <= eps) {
            trace.termination = Termination::ResidualSmall;
        } else {
            trace.termination = Termination::IterLimit;
            for (std::size_t k = 0; k < config.max_iter; ++k) {
                Vector<Scalar> next;
                switch (config.method) {
                    case Method::CCRM: {
                        auto [y, rec] = detail::ccrm_step(problem, *policy, x, k, evals);
                        next = std::move(y);
                        trace.selections.push_back(std::move(rec));
                        break;
                    }
                    case Method::SEPM: next = detail::sepm_step(problem, x, evals); break;
                    case Method::SIPM: next = detail::sipm_step(problem, x, evals); break;
                    case Method::CRM_P:
                        zp = detail::crmp_step(problem, zp, evals);
                        next = zp.block_average();
                        break;
                }
                const double step = static_cast<double>((next - x).norm());
                x = std::move(next);
                trace.step_norms.push_back(step);
                record_state(x);
                if (trace.residuals.back() <= eps) {
                    trace.termination = Termination::ResidualSmall;
                    break;
                }
                if (config.step_test && step <= eps) {
                    trace.termination = Termination::StepSmall;
                    break;
                }
            }
        }
    } catch (const SolveFailure<Scalar>&) {
        throw;
    } catch (const Error& e) {
        trace.final_iterate = x;
        trace.wall_time_s = seconds();
        throw SolveFailure<Scalar>(e, std::move(trace));
    }
    trace.final_iterate = std::move(x);
    trace.wall_time_s = seconds();
    return trace;
}

}  // namespace ccrm
