#pragma once

#include "dgocp/optimizer.hpp"
#include "dgocp/problems.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dgocp {

/// How err_x and err_u are measured.
enum class ErrorNorm {
    nodal,           ///< discrete L^2 over r + 1 equidistant points per interval
    nodal_skip_last, ///< the same sum without the final interval
    gauss,           ///< Gauss approximation of the continuous L^2 norm
};

struct StudyOptions {
    std::vector<int> orders{1, 2, 3};
    int levels = 6;
    double h0 = 0.1; ///< level k uses h = h0 2^-k
    Method method = Method::fbs;
    double grad_tol = 1e-14;
    int max_outer = 10000;
    IntegrationKind integration = IntegrationKind::gauss;
    std::size_t quad_points = 0;
    AdjointJacobian sweep_adjoint = AdjointJacobian::exact;
    ErrorNorm norm = ErrorNorm::nodal;
    /// Overrides the problem's self-refined reference.
    std::optional<SelfRefined> reference;
    bool parallel = true;
};

/// linear-lq: the defaults. nonlinear-quadratic: nodal integration, a frozen
/// adjoint Jacobian inside the sweep and the last interval left out of the error.
StudyOptions table_preset(const BuiltinProblem& problem);

struct ConvergenceRow {
    int r = 0;
    double h = 0.0;
    double err_x = 0.0;
    double err_u = 0.0;
    std::optional<double> rate_x; ///< empty on the first level or when an error is at round-off
    std::optional<double> rate_u;
    int iterations = 0;
    bool converged = false;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows; ///< ordered by (r, level)
    /// Non-empty when a run stalled; rows then stop before the stalled level.
    std::string failure;
};

/// Errors below this are treated as round-off and get no rate.
inline constexpr double round_off_floor = 1e-14;

/// log2(coarse / fine), empty when either error is at or below round_off_floor.
std::optional<double> observed_rate(double coarse, double fine);

/// Runs minimize for every (r, level) and measures state and control errors
/// against the exact solution or a self-refined reference.
ConvergenceReport run_study(const BuiltinProblem& problem, const StudyOptions& options);

/// CSV with header r,h,err_x,err_u,rate_x,rate_u. Errors use %.4e, rates %.2f;
/// a missing rate prints as "-".
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

} // namespace dgocp
