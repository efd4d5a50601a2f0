#pragma once

#include "dgocp/dg_function.hpp"
#include "dgocp/integration.hpp"

#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace dgocp {

/// Right-hand side of x' = F(t, x) with its state Jacobian.
struct IVPRight {
    std::function<Vector(const TimePoint&, const Vector&)> value;
    std::function<Matrix(const TimePoint&, const Vector&)> jacobian;
    /// Global Lipschitz constant L, if known; h L >= 1 triggers a warning.
    std::optional<double> lipschitz_bound;
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
    double damping = 1.0;
    double min_damping = 1.0 / 1024.0;
    /// Receives non-fatal diagnostics; std::clog when empty.
    std::function<void(const std::string&)> warn;
};

/// Polynomial degree of the DG space plus the integration scheme for the nonlinear terms.
struct Discretization {
    int order = 1;
    IntegrationKind integration = IntegrationKind::gauss;
    std::size_t quad_points = 0; ///< Gauss points; 0 selects default_quadrature_points(order)

    [[nodiscard]] IntegrationRule rule() const { return {order, integration, quad_points}; }
};

/// Newton failed on one interval after max_iter iterations.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(std::size_t interval, double residual);

    [[nodiscard]] std::size_t interval() const noexcept { return interval_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    std::size_t interval_;
    double residual_;
};

/// DG solution of x' = F(t, x), x(0) = x0, marching interval by interval.
///
/// On I_n the (r + 1) d unknowns satisfy
///   (x' - F(., x), phi)_{I_n} + (x_{n-1}^+ - x_{n-1}^-) . phi_{n-1}^+ = 0
/// for every phi of degree <= r, with x_0^- := x0. The residual is driven below
/// tol * max(1, |x_{n-1}^-|, h/2 |F|) in max norm.
DGFunction solve_forward(const IVPRight& rhs, const Vector& x0, const Partition& partition,
                         const Discretization& disc, const NewtonOptions& opts = {});
DGFunction solve_forward(const IVPRight& rhs, const Vector& x0, const Partition& partition, int order,
                         const NewtonOptions& opts = {});

/// Terminal-value DG solve of lambda' = F(t, lambda), lambda(T) = xT, by the
/// time-reversal W(s) = lambda(T - s): a forward solve of W' = -F(T - s, W)
/// on the reversed partition. The result lives on `partition`.
DGFunction solve_backward(const IVPRight& rhs, const Vector& xT, const Partition& partition,
                          const Discretization& disc, const NewtonOptions& opts = {});
DGFunction solve_backward(const IVPRight& rhs, const Vector& xT, const Partition& partition, int order,
                          const NewtonOptions& opts = {});

/// W' = -F(T - s, W), sample points mapped back to the original orientation.
IVPRight reverse_time(const IVPRight& rhs, const Partition& partition);

/// Weak-form residual of the backward DG equation
///   B(phi, lambda) + (phi, F(., lambda))_I - (phi_N^-, lambda_T)
/// for every basis function phi = P_j e_i on every interval, assembled directly
/// from the definition of B. Entries are ordered like DGFunction coefficients.
std::vector<double> backward_weak_residual(const IVPRight& rhs, const DGFunction& lambda, const Vector& terminal,
                                           const Discretization& disc);

/// Weak-form residual of the forward DG equation B(x, phi) - (F(., x), phi)_I - (x0, phi_0^+).
std::vector<double> forward_weak_residual(const IVPRight& rhs, const DGFunction& x, const Vector& initial,
                                          const Discretization& disc);

/// Largest relative discrepancy between rhs.jacobian and central differences of rhs.value at random probes.
double jacobian_discrepancy(const IVPRight& rhs, int dim, double horizon, std::mt19937_64& rng, int probes = 8);

} // namespace dgocp
