#pragma once

#include "dgocp/polybasis.hpp"

#include <cstddef>
#include <vector>

namespace dgocp {

/// How the nonlinear integrals (F(t, x), phi)_{I_n} are evaluated.
///
/// `gauss` samples the integrand at Gauss points. `nodal` interpolates F at
/// r + 1 equidistant points (endpoints included) and integrates the
/// interpolant exactly against the test polynomials; both coincide when F is
/// affine in x with polynomial coefficients of degree <= r.
enum class IntegrationKind { gauss, nodal };

/// Default Gauss point count r + 3, overridden by the DGOCP_QUAD_POINTS environment variable.
std::size_t default_quadrature_points(int order);

/// Sample points and load weights of one integration scheme for test polynomials of degree <= r.
///
/// (F, P_j)_{[-1,1]} ~= sum_p load_weight(j, p) F(xi_p). `weight(p)` is the
/// matching scalar rule (j = 0 row), used for costs and norms.
class IntegrationRule {
public:
    IntegrationRule(int order, IntegrationKind kind, std::size_t gauss_points = 0);

    [[nodiscard]] IntegrationKind kind() const noexcept { return kind_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] std::size_t basis_size() const noexcept { return static_cast<std::size_t>(order_) + 1; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] double point(std::size_t p) const { return points_[p]; }
    [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
    [[nodiscard]] double weight(std::size_t p) const { return load_[p]; }
    [[nodiscard]] double load_weight(std::size_t j, std::size_t p) const { return load_[j * size() + p]; }
    /// P_k at sample point p.
    [[nodiscard]] double basis(std::size_t p, std::size_t k) const { return values_[p * basis_size() + k]; }
    /// Exact stiffness entry int_{-1}^{1} P_k' P_j.
    [[nodiscard]] double stiffness(std::size_t j, std::size_t k) const { return stiffness_[j * basis_size() + k]; }

private:
    int order_;
    IntegrationKind kind_;
    std::vector<double> points_;
    std::vector<double> load_;
    std::vector<double> values_;
    std::vector<double> stiffness_;
};

/// Equidistant points -1 = tau_0 < ... < tau_r = 1 (the midpoint when r = 0).
std::vector<double> equidistant_points(int order);

} // namespace dgocp
