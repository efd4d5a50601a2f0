#include "dgocp/polybasis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace dgocp;

TEST(Legendre, LowOrderValues)
{
    EXPECT_DOUBLE_EQ(legendre_eval(0, 0.3), 1.0);
    EXPECT_DOUBLE_EQ(legendre_eval(1, 0.5), 0.5);
    for (double xi : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
        EXPECT_NEAR(legendre_eval(2, xi), 0.5 * (3.0 * xi * xi - 1.0), 1e-15);
        EXPECT_NEAR(legendre_eval(3, xi), 0.5 * (5.0 * xi * xi * xi - 3.0 * xi), 1e-15);
    }
}

TEST(Legendre, EndpointTraces)
{
    for (int k = 0; k <= 12; ++k) {
        EXPECT_NEAR(legendre_eval(k, 1.0), 1.0, 1e-14);
        EXPECT_NEAR(legendre_eval(k, -1.0), k % 2 == 0 ? 1.0 : -1.0, 1e-14);
    }
}

TEST(Legendre, BoundedOnReferenceInterval)
{
    for (int k = 0; k <= 12; ++k) {
        for (int i = 0; i <= 400; ++i) {
            EXPECT_LE(std::abs(legendre_eval(k, -1.0 + i / 200.0)), 1.0 + 1e-14);
        }
    }
}

TEST(Legendre, RejectsOutsideDomain)
{
    EXPECT_THROW(legendre_eval(2, 1.5), std::domain_error);
    EXPECT_THROW(legendre_eval(2, -1.0001), std::domain_error);
    EXPECT_THROW(legendre_eval(-1, 0.0), std::invalid_argument);
}

TEST(Legendre, Derivatives)
{
    EXPECT_DOUBLE_EQ(legendre_deriv(1, -0.7), 1.0);
    EXPECT_DOUBLE_EQ(legendre_deriv(0, 0.2), 0.0);
    for (int k = 2; k <= 8; ++k) {
        for (double xi : {-0.9, -0.3, 0.1, 0.6}) {
            const double eps = 1e-6;
            const double fd = (legendre_eval(k, xi + eps) - legendre_eval(k, xi - eps)) / (2.0 * eps);
            EXPECT_NEAR(legendre_deriv(k, xi), fd, 1e-8) << "k=" << k;
        }
    }
    EXPECT_NEAR(legendre_deriv(5, 1.0), 15.0, 1e-13);
}

TEST(Gauss, ClosedFormRules)
{
    const QuadratureRule one = gauss_rule(1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_DOUBLE_EQ(one.points[0], 0.0);
    EXPECT_DOUBLE_EQ(one.weights[0], 2.0);

    const QuadratureRule two = gauss_rule(2);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_NEAR(two.points[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(two.points[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(two.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(two.weights[1], 1.0, 1e-15);

    const QuadratureRule three = gauss_rule(3);
    EXPECT_NEAR(three.points[2], std::sqrt(0.6), 1e-15);
    EXPECT_NEAR(three.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(Gauss, RejectsEmptyRule)
{
    EXPECT_THROW(gauss_rule(0), std::invalid_argument);
}

TEST(Gauss, WeightsSumToTwoAndNodesIncrease)
{
    for (std::size_t q = 1; q <= 20; ++q) {
        const QuadratureRule rule = gauss_rule(q);
        double sum = 0.0;
        for (std::size_t i = 0; i < q; ++i) {
            sum += rule.weights[i];
            EXPECT_GT(rule.weights[i], 0.0);
            if (i > 0) {
                EXPECT_LT(rule.points[i - 1], rule.points[i]);
            }
        }
        EXPECT_NEAR(sum, 2.0, 1e-13) << "q=" << q;
    }
}

TEST(Gauss, ExactForRandomPolynomials)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (std::size_t q = 1; q <= 10; ++q) {
        const QuadratureRule rule = gauss_rule(q);
        for (int trial = 0; trial < 5; ++trial) {
            const int degree = static_cast<int>(2 * q - 1);
            std::vector<double> a(degree + 1);
            double exact = 0.0;
            for (int m = 0; m <= degree; ++m) {
                a[m] = coef(rng);
                // int_{-1}^{1} t^m dt
                exact += m % 2 == 0 ? a[m] * 2.0 / (m + 1) : 0.0;
            }
            double approx = 0.0;
            for (std::size_t i = 0; i < q; ++i) {
                double v = 0.0;
                for (int m = degree; m >= 0; --m) {
                    v = v * rule.points[i] + a[m];
                }
                approx += rule.weights[i] * v;
            }
            EXPECT_NEAR(approx, exact, 1e-12) << "q=" << q;
        }
    }
}

TEST(ReferenceBasis, Orthogonality)
{
    const ReferenceBasis basis(8, gauss_rule(10));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        for (std::size_t k = 0; k < basis.size(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < basis.rule().size(); ++i) {
                s += basis.rule().weights[i] * basis.value(i, j) * basis.value(i, k);
            }
            EXPECT_NEAR(s, j == k ? ReferenceBasis::norm_squared(k) : 0.0, 1e-12);
        }
    }
}

TEST(ReferenceBasis, TracesAndTabulation)
{
    const ReferenceBasis basis(4, gauss_rule(3));
    EXPECT_EQ(basis.size(), 5u);
    EXPECT_EQ(basis.left_trace(3), -1.0);
    EXPECT_EQ(basis.left_trace(4), 1.0);
    EXPECT_EQ(basis.right_trace(3), 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(basis.value(i, 2), legendre_eval(2, basis.rule().points[i]));
        EXPECT_DOUBLE_EQ(basis.deriv(i, 3), legendre_deriv(3, basis.rule().points[i]));
    }
}
