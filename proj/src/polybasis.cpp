#include "dgocp/polybasis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dgocp {

namespace {

void check_arguments(int k, double xi)
{
    if (k < 0) {
        throw std::invalid_argument("legendre: negative degree " + std::to_string(k));
    }
    if (!(xi >= -1.0 && xi <= 1.0)) {
        throw std::domain_error("legendre: point " + std::to_string(xi) + " outside [-1, 1]");
    }
}

// Returns {P_k(xi), P_{k-1}(xi)}.
std::pair<double, double> legendre_pair(int k, double xi)
{
    double prev = 1.0;
    if (k == 0) {
        return {prev, 0.0};
    }
    double cur = xi;
    for (int n = 1; n < k; ++n) {
        const double next = ((2.0 * n + 1.0) * xi * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

} // namespace

double legendre_eval(int k, double xi)
{
    check_arguments(k, xi);
    return legendre_pair(k, xi).first;
}

double legendre_deriv(int k, double xi)
{
    check_arguments(k, xi);
    if (k == 0) {
        return 0.0;
    }
    // P_k' = sum over j = k-1, k-3, ... of (2j + 1) P_j; avoids the 1/(1 - xi^2) singularity.
    double sum = 0.0;
    for (int j = k - 1; j >= 0; j -= 2) {
        sum += (2.0 * j + 1.0) * legendre_pair(j, xi).first;
    }
    return sum;
}

QuadratureRule gauss_rule(std::size_t q)
{
    if (q == 0) {
        throw std::invalid_argument("gauss_rule: need at least one point");
    }
    QuadratureRule rule;
    rule.points.resize(q);
    rule.weights.resize(q);
    const int n = static_cast<int>(q);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const auto [p, pm1] = legendre_pair(n, x);
            dp = n * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const auto [p, pm1] = legendre_pair(n, x);
        dp = n * (x * p - pm1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x;
        rule.points[q - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[q - 1 - i] = w;
    }
    if (q % 2 == 1) {
        rule.points[q / 2] = 0.0;
    }
    return rule;
}

ReferenceBasis::ReferenceBasis(int order, QuadratureRule rule)
    : order_(order), rule_(std::move(rule))
{
    if (order < 0) {
        throw std::invalid_argument("ReferenceBasis: negative order");
    }
    values_.resize(rule_.size() * size());
    derivs_.resize(rule_.size() * size());
    for (std::size_t q = 0; q < rule_.size(); ++q) {
        for (std::size_t k = 0; k < size(); ++k) {
            values_[q * size() + k] = legendre_eval(static_cast<int>(k), rule_.points[q]);
            derivs_[q * size() + k] = legendre_deriv(static_cast<int>(k), rule_.points[q]);
        }
    }
}

} // namespace dgocp
