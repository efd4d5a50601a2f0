#include "dgocp/dg_ivp.hpp"
#include "dgocp/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace dgocp;

namespace {

Vector vec(double v)
{
    return Vector::Constant(1, v);
}

IVPRight scalar_rhs(std::function<double(double, double)> f, std::function<double(double, double)> dfdx)
{
    IVPRight rhs;
    rhs.value = [f](const TimePoint& pt, const Vector& x) { return vec(f(pt.t, x(0))); };
    rhs.jacobian = [dfdx](const TimePoint& pt, const Vector& x) { return Matrix::Constant(1, 1, dfdx(pt.t, x(0))); };
    return rhs;
}

// Classical RK4 with a fixed step.
double rk4(const std::function<double(double, double)>& f, double x0, double T, int steps)
{
    const double h = T / steps;
    double x = x0;
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        const double k1 = f(t, x);
        const double k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = f(t + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

// x' = A(t) x + b(t) with random smooth coefficients.
IVPRight random_linear(int d, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Matrix a0(d, d);
    Matrix a1(d, d);
    Vector b0(d);
    for (int i = 0; i < d; ++i) {
        b0(i) = unit(rng);
        for (int j = 0; j < d; ++j) {
            a0(i, j) = unit(rng);
            a1(i, j) = unit(rng);
        }
    }
    IVPRight rhs;
    rhs.value = [=](const TimePoint& pt, const Vector& x) -> Vector {
        return (a0 + pt.t * a1) * x + std::cos(3.0 * pt.t) * b0;
    };
    rhs.jacobian = [=](const TimePoint& pt, const Vector&) -> Matrix { return a0 + pt.t * a1; };
    return rhs;
}

} // namespace

TEST(SolveForward, ZeroRightHandSideKeepsInitialValue)
{
    const IVPRight rhs = scalar_rhs([](double, double) { return 0.0; }, [](double, double) { return 0.0; });
    for (int r = 0; r <= 3; ++r) {
        const DGFunction x = solve_forward(rhs, vec(5.0), Partition({0.0, 0.3, 0.35, 1.0}), r);
        for (std::size_t n = 0; n < 3; ++n) {
            EXPECT_EQ(x.coeff(n, 0)(0), 5.0);
            for (int k = 1; k <= r; ++k) {
                EXPECT_EQ(x.coeff(n, k)(0), 0.0);
            }
        }
    }
}

TEST(SolveBackward, ZeroRightHandSideKeepsTerminalValue)
{
    const IVPRight rhs = scalar_rhs([](double, double) { return 0.0; }, [](double, double) { return 0.0; });
    for (int r = 0; r <= 3; ++r) {
        const DGFunction l = solve_backward(rhs, vec(3.0), make_uniform_partition(2.0, 5), r);
        for (double t : {0.0, 0.7, 1.2, 2.0}) {
            EXPECT_NEAR(l.eval(t, Side::left)(0), 3.0, 1e-15);
        }
    }
}

TEST(SolveForward, RiccatiBlowupProfile)
{
    // x' = x^2, x(0) = 2: x(t) = 2 / (1 - 2t), x(0.2) = 10/3
    const IVPRight rhs = scalar_rhs([](double, double x) { return x * x; }, [](double, double x) { return 2.0 * x; });
    const DGFunction x = solve_forward(rhs, vec(2.0), make_uniform_partition(0.2, 64), 3);
    EXPECT_NEAR(x.trace_minus(64)(0), 10.0 / 3.0, 1e-6);
}

TEST(SolveForward, AgreesWithRungeKuttaOracle)
{
    auto f = [](double t, double x) { return std::sin(x) + t; };
    const IVPRight rhs = scalar_rhs(f, [](double, double x) { return std::cos(x); });
    const double oracle = rk4(f, 0.5, 1.0, 20000);
    const DGFunction x = solve_forward(rhs, vec(0.5), make_uniform_partition(1.0, 32), 2);
    EXPECT_NEAR(x.trace_minus(32)(0), oracle, 1e-9);
}

TEST(SolveForward, PolynomialReproduction)
{
    // x' = 3 t^2 - 2 t, x(0) = 1: x = t^3 - t^2 + 1, degree 3
    const IVPRight cubic = scalar_rhs([](double t, double) { return 3.0 * t * t - 2.0 * t; },
                                      [](double, double) { return 0.0; });
    const Partition p({0.0, 0.2, 0.25, 0.7, 1.0});
    const DGFunction x = solve_forward(cubic, vec(1.0), p, 3);
    for (double t : {0.0, 0.1, 0.25, 0.6, 0.99, 1.0}) {
        EXPECT_NEAR(x.eval(t, Side::left)(0), t * t * t - t * t + 1.0, 1e-12);
    }

    // x' = x / (1 + t), x(0) = 1: x = 1 + t; F is rational but x_h = x solves the scheme.
    const IVPRight lin = scalar_rhs([](double t, double x) { return x / (1.0 + t); },
                                    [](double t, double) { return 1.0 / (1.0 + t); });
    const DGFunction y = solve_forward(lin, vec(1.0), p, 1, NewtonOptions{});
    for (double t : {0.0, 0.3, 0.8}) {
        EXPECT_NEAR(y.eval(t, Side::right)(0), 1.0 + t, 1e-9);
    }
}

TEST(SolveForward, ConvergenceOrderInSupNorm)
{
    // x' = -x + cos t, x(0) = 0: x = (sin t + cos t - e^{-t}) / 2
    const IVPRight rhs = scalar_rhs([](double t, double x) { return -x + std::cos(t); },
                                    [](double, double) { return -1.0; });
    auto exact = [](double t) { return 0.5 * (std::sin(t) + std::cos(t) - std::exp(-t)); };
    for (int r = 0; r <= 3; ++r) {
        std::vector<double> errors;
        for (std::size_t N : {8u, 16u, 32u, 64u}) {
            const Partition p = make_uniform_partition(1.0, N);
            const DGFunction x = solve_forward(rhs, vec(0.0), p, r);
            double sup = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                for (int s = 0; s <= 20; ++s) {
                    const double xi = -1.0 + s / 10.0;
                    sup = std::max(sup, std::abs(x.eval_local(n, xi)(0) - exact(p.time_at(n, xi))));
                }
            }
            errors.push_back(sup);
        }
        for (std::size_t i = 1; i < errors.size(); ++i) {
            EXPECT_NEAR(std::log2(errors[i - 1] / errors[i]), r + 1.0, 0.1) << "r=" << r << " level " << i;
        }
    }
}

TEST(SolveForward, WeakResidualVanishes)
{
    std::mt19937_64 rng(3);
    for (int r = 0; r <= 3; ++r) {
        const IVPRight rhs = random_linear(2, rng);
        const Discretization disc{r};
        const DGFunction x = solve_forward(rhs, Vector::Ones(2), make_uniform_partition(1.0, 9), disc);
        for (double v : forward_weak_residual(rhs, x, Vector::Ones(2), disc)) {
            EXPECT_LT(std::abs(v), 1e-12);
        }
    }
}

TEST(SolveForward, NodalIntegrationMatchesGaussForPolynomialData)
{
    const IVPRight rhs = scalar_rhs([](double t, double) { return 1.0 + t; }, [](double, double) { return 0.0; });
    const Partition p = make_uniform_partition(1.0, 3);
    for (int r = 1; r <= 3; ++r) {
        const DGFunction a = solve_forward(rhs, vec(0.0), p, Discretization{r, IntegrationKind::gauss});
        const DGFunction b = solve_forward(rhs, vec(0.0), p, Discretization{r, IntegrationKind::nodal});
        for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
            EXPECT_NEAR(a.coefficients()[i], b.coefficients()[i], 1e-14);
        }
    }
}

TEST(SolveForward, ReportsNewtonFailure)
{
    // r = 0 on one interval: c - 10 - c^2 = 0 has no real root.
    const IVPRight rhs = scalar_rhs([](double, double x) { return x * x; }, [](double, double x) { return 2.0 * x; });
    NewtonOptions opts;
    opts.max_iter = 30;
    opts.warn = [](const std::string&) {};
    try {
        (void)solve_forward(rhs, vec(10.0), make_uniform_partition(1.0, 1), 0, opts);
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure& e) {
        EXPECT_EQ(e.interval(), 0u);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(SolveForward, WarnsWhenStepExceedsLipschitzBound)
{
    IVPRight rhs = scalar_rhs([](double, double x) { return -x; }, [](double, double) { return -1.0; });
    rhs.lipschitz_bound = 10.0;
    NewtonOptions opts;
    std::vector<std::string> messages;
    opts.warn = [&messages](const std::string& m) { messages.push_back(m); };
    (void)solve_forward(rhs, vec(1.0), make_uniform_partition(1.0, 2), 1, opts);
    EXPECT_FALSE(messages.empty());
    messages.clear();
    (void)solve_forward(rhs, vec(1.0), make_uniform_partition(1.0, 20), 1, opts);
    EXPECT_TRUE(messages.empty());
}

TEST(SolveForward, RejectsBadInput)
{
    const IVPRight rhs = scalar_rhs([](double, double x) { return x; }, [](double, double) { return 1.0; });
    EXPECT_THROW(solve_forward(rhs, vec(1.0), make_uniform_partition(1.0, 2), -1), std::invalid_argument);
    NewtonOptions bad;
    bad.tol = 0.0;
    EXPECT_THROW(solve_forward(rhs, vec(1.0), make_uniform_partition(1.0, 2), 1, bad), std::invalid_argument);
}

TEST(TimeReversal, BackwardEqualsReversedForwardAndGlobalSolve)
{
    std::mt19937_64 rng(2024);
    for (int r = 0; r <= 3; ++r) {
        for (int trial = 0; trial < 3; ++trial) {
            const int d = 1 + trial;
            const IVPRight rhs = random_linear(d, rng);
            const Partition p({0.0, 0.1, 0.35, 0.4, 0.8, 1.0});
            const Discretization disc{r};
            const Vector terminal = Vector::LinSpaced(d, -1.0, 1.0);
            const DGFunction back = solve_backward(rhs, terminal, p, disc);
            const DGFunction fwd = solve_forward(reverse_time(rhs, p), terminal, p.reversed(), disc).reversed();
            const DGFunction global = solve_backward_global(rhs, terminal, p, disc, d);
            for (std::size_t i = 0; i < back.coefficients().size(); ++i) {
                EXPECT_NEAR(back.coefficients()[i], fwd.coefficients()[i], 1e-12);
                EXPECT_NEAR(back.coefficients()[i], global.coefficients()[i], 1e-12);
            }
            EXPECT_LE((back.eval(1.0, Side::left) - back.trace_minus(5)).norm(), 0.0);
        }
    }
}

TEST(Stability, StateBoundedByControlNorm)
{
    // x' = -x + u, x(0) = 0: |x(t)| <= ||u||_{L2(0,1)}; the DG bound holds with a mesh-stable constant.
    // Smooth bounded controls drawn once, so the same family is seen on every mesh.
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::array<double, 5>> modes(100);
    for (auto& m : modes) {
        for (double& a : m) {
            a = unit(rng);
        }
    }
    std::vector<double> constants;
    for (std::size_t N : {8u, 16u, 32u, 64u}) {
        const Partition p = make_uniform_partition(1.0, N);
        double worst = 0.0;
        for (const auto& m : modes) {
            const DGFunction u = project_l2(
                [&m](double t) {
                    const double v = m[0] + m[1] * std::cos(M_PI * t) + m[2] * std::sin(M_PI * t) +
                                     m[3] * std::cos(2.0 * M_PI * t) + m[4] * std::sin(2.0 * M_PI * t);
                    return vec(std::clamp(v, -1.0, 1.0));
                },
                p, 1);
            IVPRight rhs;
            rhs.value = [&u](const TimePoint& pt, const Vector& x) -> Vector { return -x + u.eval(pt); };
            rhs.jacobian = [](const TimePoint&, const Vector&) -> Matrix { return -Matrix::Identity(1, 1); };
            const DGFunction x = solve_forward(rhs, vec(0.0), p, 1);
            std::vector<double> pts;
            for (int s = 0; s <= 10; ++s) {
                pts.push_back(-1.0 + s / 5.0);
            }
            worst = std::max(worst, sup_norm_at(x, pts) / l2_norm(u));
        }
        constants.push_back(worst);
    }
    for (double c : constants) {
        EXPECT_LT(c, 1.5);
        EXPECT_NEAR(c, constants.back(), 0.05 * constants.back());
    }
}

TEST(Jacobian, DiscrepancyDetectsWrongDerivative)
{
    std::mt19937_64 rng(1);
    const IVPRight good = scalar_rhs([](double t, double x) { return std::sin(x) * t; },
                                     [](double t, double x) { return std::cos(x) * t; });
    EXPECT_LT(jacobian_discrepancy(good, 1, 1.0, rng), 1e-5);
    const IVPRight bad = scalar_rhs([](double t, double x) { return std::sin(x) * t; },
                                    [](double, double x) { return std::cos(x); });
    EXPECT_GT(jacobian_discrepancy(bad, 1, 1.0, rng), 1e-2);
}
