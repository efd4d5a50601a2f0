#include "dgocp/integration.hpp"

#include <Eigen/Dense>

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dgocp {

std::size_t default_quadrature_points(int order)
{
    if (const char* env = std::getenv("DGOCP_QUAD_POINTS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long q = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || q < 1) {
            throw std::invalid_argument(std::string("DGOCP_QUAD_POINTS: not a positive integer: ") + env);
        }
        return static_cast<std::size_t>(q);
    }
    return static_cast<std::size_t>(order) + 3;
}

std::vector<double> equidistant_points(int order)
{
    if (order == 0) {
        return {0.0};
    }
    std::vector<double> tau(static_cast<std::size_t>(order) + 1);
    for (int i = 0; i <= order; ++i) {
        tau[i] = -1.0 + 2.0 * i / order;
    }
    tau.front() = -1.0;
    tau.back() = 1.0;
    return tau;
}

IntegrationRule::IntegrationRule(int order, IntegrationKind kind, std::size_t gauss_points)
    : order_(order), kind_(kind)
{
    if (order < 0) {
        throw std::invalid_argument("IntegrationRule: negative order");
    }
    const std::size_t nb = basis_size();

    if (kind == IntegrationKind::gauss) {
        const auto rule = gauss_rule(gauss_points == 0 ? default_quadrature_points(order) : gauss_points);
        points_ = rule.points;
        load_.resize(nb * size());
        for (std::size_t j = 0; j < nb; ++j) {
            for (std::size_t p = 0; p < size(); ++p) {
                load_[j * size() + p] = rule.weights[p] * legendre_eval(static_cast<int>(j), points_[p]);
            }
        }
    } else {
        points_ = equidistant_points(order);
        // Interpolant coefficients a = V^{-1} F, and (sum_k a_k P_k, P_j) = a_j ||P_j||^2.
        Eigen::MatrixXd vandermonde(nb, nb);
        for (std::size_t i = 0; i < nb; ++i) {
            for (std::size_t k = 0; k < nb; ++k) {
                vandermonde(i, k) = legendre_eval(static_cast<int>(k), points_[i]);
            }
        }
        const Eigen::MatrixXd inv = vandermonde.inverse();
        load_.resize(nb * nb);
        for (std::size_t j = 0; j < nb; ++j) {
            for (std::size_t p = 0; p < nb; ++p) {
                load_[j * nb + p] = ReferenceBasis::norm_squared(j) * inv(j, p);
            }
        }
    }

    values_.resize(size() * nb);
    for (std::size_t p = 0; p < size(); ++p) {
        for (std::size_t k = 0; k < nb; ++k) {
            values_[p * nb + k] = legendre_eval(static_cast<int>(k), points_[p]);
        }
    }

    const ReferenceBasis exact(order, gauss_rule(nb + 1));
    stiffness_.assign(nb * nb, 0.0);
    for (std::size_t j = 0; j < nb; ++j) {
        for (std::size_t k = 0; k < nb; ++k) {
            double s = 0.0;
            for (std::size_t q = 0; q < exact.rule().size(); ++q) {
                s += exact.rule().weights[q] * exact.deriv(q, k) * exact.value(q, j);
            }
            stiffness_[j * nb + k] = s;
        }
    }
}

} // namespace dgocp
