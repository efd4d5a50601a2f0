#pragma once

#include "dgocp/ocp.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace dgocp {

enum class Method { pgd, fbs };

struct OptimizeOptions {
    Method method = Method::pgd;
    double grad_tol = 1e-10;
    int max_outer = 10000;
    double step0 = 1.0;
    double armijo_c = 1e-4;
    /// Forward-backward sweep relaxation theta in (0, 1]; halved when a sweep fails to improve.
    double fbs_relax = 1.0;
    /// Smallest step (PGD) or relaxation (FBS) tried before giving up.
    double min_step = 1e-12;

    IntegrationKind integration = IntegrationKind::gauss;
    std::size_t quad_points = 0;
    /// Adjoint Jacobian used inside the forward-backward sweep. `frozen` needs
    /// OCProblem::fx_frozen; convergence is then judged on the sweep increment.
    AdjointJacobian sweep_adjoint = AdjointJacobian::exact;
    NewtonOptions newton;
    /// CSV iteration log (iter,cost,stationarity,step); empty disables it.
    std::string log_path;

    /// Throws std::invalid_argument on non-positive tolerances or theta outside (0, 1].
    void validate() const;
};

struct OptimizeReport {
    ControlFunction u_star;
    DGFunction x_star;
    DGFunction lambda_star;
    std::vector<double> cost_history;
    std::vector<double> stationarity_history;
    std::vector<double> step_history;
    int iterations = 0;
    bool converged = false;
    /// Sweep increment fell below grad_tol (only meaningful for a frozen-Jacobian sweep).
    bool sweep_converged = false;
    double tv_u = 0.0;

    [[nodiscard]] double final_cost() const { return cost_history.empty() ? 0.0 : cost_history.back(); }
    [[nodiscard]] double final_stationarity() const
    {
        return stationarity_history.empty() ? 0.0 : stationarity_history.back();
    }
};

/// No step or relaxation down to the floor decreased the objective.
class StallError : public std::runtime_error {
public:
    StallError(const std::string& what, int iteration, double cost, double stationarity);

    [[nodiscard]] int iteration() const noexcept { return iteration_; }
    [[nodiscard]] double cost() const noexcept { return cost_; }
    [[nodiscard]] double stationarity() const noexcept { return stationarity_; }

private:
    int iteration_;
    double cost_;
    double stationarity_;
};

/// Weighted least-squares fit of a point field into X_h^degree using the sample
/// points and scalar weights of `rule` (exact for data of degree <= degree).
DGFunction fit_to_space(const PointField& field, const Partition& partition, int degree, int dim,
                        const IntegrationRule& rule);

/// Clamps the values of u at the degree + 1 Gauss points of every interval to the box.
/// Coefficients of intervals that already satisfy the bounds are left untouched.
DGFunction project_to_box(const DGFunction& u, const Box& box);

/// Values of u at the Gauss nodes of every interval are inside the box (with slack).
bool within_box(const DGFunction& u, const Box& box, double slack = 0.0);

/// Minimizes j_h over controls of degree r_control <= r_state within the box.
///
/// pgd: u <- Pi(u - alpha G) where G is the L^2 representative of the gradient in
/// the control space; alpha backtracks from step0 until the Armijo condition holds.
/// fbs: u <- (1 - theta) u + theta Pi(u_hat), u_hat solving g_u - f_u^T lambda = 0 pointwise
/// (closed form when the problem registers one, else Newton per point refined to the
/// Galerkin solution in the control space).
/// Stops once the projected-gradient sup norm drops to grad_tol or after max_outer iterations.
OptimizeReport minimize(const OCProblem& p, const ControlFunction& u0, const Partition& partition, int r_state,
                        int r_control, const OptimizeOptions& opts = {});

/// sup of |u - Pi(u - G)| with G the fit of grad j_h(u) into the control space, taken
/// at the Gauss nodes of the control degree. Closed-form controls use the raw gradient
/// at the sample points.
double stationarity(const OCProblem& p, const ControlFunction& u, const Partition& partition, int r,
                    const OptimizeOptions& opts = {});

/// Same measure from an existing evaluation.
double stationarity(const OCProblem& p, const ReducedEvaluation& eval, const Partition& partition,
                    const Discretization& disc);

} // namespace dgocp
