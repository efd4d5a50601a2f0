#pragma once

#include "dgocp/control.hpp"
#include "dgocp/dg_ivp.hpp"

#include <functional>
#include <optional>
#include <random>

namespace dgocp {

/// Minimize int_0^T g(t, x, u) dt subject to x' = f(t, x, u), x(0) = x0, u_lo <= u <= u_hi.
///
/// Adjoint sign convention: lambda' = -f_x^T lambda + g_x with lambda(T) = 0, so
/// the reduced gradient is g_u - f_u^T lambda.
///
/// Second partials of f are contracted with a multiplier: fxx(t, x, u, mu)
/// returns sum_i mu_i d^2 f_i / dx^2 (d x d), and likewise fxu (d x m) and fuu
/// (m x m). They are only needed by hessian_form.
struct OCProblem {
    using VectorField = std::function<Vector(double, const Vector&, const Vector&)>;
    using ScalarField = std::function<double(double, const Vector&, const Vector&)>;
    using MatrixField = std::function<Matrix(double, const Vector&, const Vector&)>;
    using ContractedField = std::function<Matrix(double, const Vector&, const Vector&, const Vector&)>;

    int state_dim = 1;
    int control_dim = 1;
    double horizon = 1.0;
    Vector x0;

    VectorField f;
    ScalarField g;
    MatrixField fx; ///< d x d
    MatrixField fu; ///< d x m
    VectorField gx; ///< d
    VectorField gu; ///< m

    ContractedField fxx;
    ContractedField fxu;
    ContractedField fuu;
    MatrixField gxx;
    MatrixField gxu;
    MatrixField guu;

    Box box;
    std::optional<double> smoothness_bound;

    /// Optional closed-form solution u(t, x, lambda) of g_u - f_u^T lambda = 0.
    std::function<Vector(double, const Vector&, const Vector&)> control_update;

    /// Optional state Jacobian with frozen coefficients (e.g. x*x linearized as
    /// x_old * x). A forward-backward sweep may use it in place of fx for its
    /// adjoint; the resulting fixed point is then not a stationary point of j_h.
    MatrixField fx_frozen;

    /// Throws std::invalid_argument on missing callables or inconsistent dimensions/bounds.
    void validate() const;
    [[nodiscard]] bool has_second_derivatives() const;
};

/// Largest relative mismatch between the supplied first and second partials
/// and central differences of f, g (and of the first partials) at random probes.
double derivative_discrepancy(const OCProblem& p, std::mt19937_64& rng, int probes = 8);

/// Pointwise field over solver sample points.
using PointField = std::function<Vector(const TimePoint&)>;

/// Which state Jacobian the adjoint equation uses.
enum class AdjointJacobian { exact, frozen };

/// x_h = G_h(u): DG solve of x' = f(t, x, u(t)), x(0) = x0.
DGFunction solve_state(const OCProblem& p, const ControlFunction& u, const Partition& partition,
                       const Discretization& disc, const NewtonOptions& opts = {});

/// Discrete adjoint: B(phi, lambda_h) = (phi, f_x lambda_h - g_x)_I for all phi,
/// computed as a backward DG solve of lambda' = -f_x^T lambda + g_x, lambda(T) = 0.
DGFunction solve_adjoint(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                         const Discretization& disc, const NewtonOptions& opts = {},
                         AdjointJacobian jacobian = AdjointJacobian::exact);

/// Right-hand side lambda' = -f_x^T lambda + g_x along (x_h, u).
IVPRight adjoint_rhs(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                     AdjointJacobian jacobian = AdjointJacobian::exact);

/// Pointwise reduced gradient g_u(t, x_h, u) - f_u^T(t, x_h, u) lambda_h(t).
PointField reduced_gradient(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                            const DGFunction& lambda);

/// Quadrature pairing (a, b)_I over the partition with the scalar weights of `disc`.
double pair(const PointField& a, const PointField& b, const Partition& partition, const Discretization& disc);

/// j_h'(u) v = (gradient, v)_I.
double directional_derivative(const PointField& gradient, const ControlFunction& v, const Partition& partition,
                              const Discretization& disc);

/// int_0^T g(t, x_h, u) dt by the quadrature of `disc`.
double cost(const OCProblem& p, const ControlFunction& u, const DGFunction& x, const Discretization& disc);

/// y_h = G_h'(u) v: DG solve of y' = f_x y + f_u v, y(0) = 0.
DGFunction tangent_solve(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                         const ControlFunction& v, const Discretization& disc, const NewtonOptions& opts = {});

/// j_h''(u)(v, v) from x_h, lambda_h, y_h and the second partials:
///   int -lambda . (f_xx[y,y] + 2 f_xu[y,v] + f_uu[v,v]) + g_xx[y,y] + 2 g_xu[y,v] + g_uu[v,v] dt.
double hessian_form(const OCProblem& p, const ControlFunction& u, const ControlFunction& v,
                    const Partition& partition, const Discretization& disc, const NewtonOptions& opts = {});

/// Max-norm weak-form residual of the discrete adjoint equation over a full basis of X_h^r.
double adjoint_residual(const OCProblem& p, const ControlFunction& u, const DGFunction& x, const DGFunction& lambda,
                        const Discretization& disc);

/// State, adjoint, cost and gradient at one control.
struct ReducedEvaluation {
    ControlFunction u;
    DGFunction x;
    DGFunction lambda;
    double cost = 0.0;
    PointField gradient;
};

ReducedEvaluation evaluate(const OCProblem& p, const ControlFunction& u, const Partition& partition,
                           const Discretization& disc, const NewtonOptions& opts = {});

/// j_h(u) alone (one state solve).
double reduced_cost(const OCProblem& p, const ControlFunction& u, const Partition& partition,
                    const Discretization& disc, const NewtonOptions& opts = {});

} // namespace dgocp
