#pragma once

#include <cstddef>
#include <vector>

namespace dgocp {

/// Legendre polynomial P_k evaluated at xi in [-1, 1] by the three-term recurrence.
/// Throws std::domain_error if xi lies outside the reference interval.
double legendre_eval(int k, double xi);

/// Derivative P_k'(xi).
double legendre_deriv(int k, double xi);

/// Nodes and weights of a quadrature rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// q-point Gauss-Legendre rule, nodes strictly increasing. Exact for degree <= 2q-1.
QuadratureRule gauss_rule(std::size_t q);

/// Legendre values and derivatives up to a fixed order, tabulated at the nodes of a rule.
///
/// Row index is the quadrature node, column index the polynomial degree. The
/// trace vectors hold P_k(-1) = (-1)^k and P_k(+1) = 1.
class ReferenceBasis {
public:
    ReferenceBasis(int order, QuadratureRule rule);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(order_) + 1; }
    [[nodiscard]] const QuadratureRule& rule() const noexcept { return rule_; }

    [[nodiscard]] double value(std::size_t node, std::size_t k) const { return values_[node * size() + k]; }
    [[nodiscard]] double deriv(std::size_t node, std::size_t k) const { return derivs_[node * size() + k]; }
    [[nodiscard]] double left_trace(std::size_t k) const { return k % 2 == 0 ? 1.0 : -1.0; }
    [[nodiscard]] double right_trace(std::size_t) const { return 1.0; }

    /// ||P_k||^2 on [-1, 1] = 2 / (2k + 1).
    [[nodiscard]] static double norm_squared(std::size_t k) { return 2.0 / (2.0 * static_cast<double>(k) + 1.0); }

private:
    int order_;
    QuadratureRule rule_;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

} // namespace dgocp
