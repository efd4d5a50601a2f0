#include "dgocp/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace dgocp {

namespace {

Vector scalar(double v)
{
    return Vector::Constant(1, v);
}

Matrix scalar_matrix(double v)
{
    return Matrix::Constant(1, 1, v);
}

// Shared pieces of g = (x^2 + u^2) / 2 for scalar problems.
void quadratic_cost(OCProblem& p)
{
    p.g = [](double, const Vector& x, const Vector& u) { return 0.5 * (x(0) * x(0) + u(0) * u(0)); };
    p.gx = [](double, const Vector& x, const Vector&) { return x; };
    p.gu = [](double, const Vector&, const Vector& u) { return u; };
    p.gxx = [](double, const Vector&, const Vector&) { return scalar_matrix(1.0); };
    p.gxu = [](double, const Vector&, const Vector&) { return scalar_matrix(0.0); };
    p.guu = [](double, const Vector&, const Vector&) { return scalar_matrix(1.0); };
    p.fu = [](double, const Vector&, const Vector&) { return scalar_matrix(1.0); };
    p.fxu = [](double, const Vector&, const Vector&, const Vector&) { return scalar_matrix(0.0); };
    p.fuu = [](double, const Vector&, const Vector&, const Vector&) { return scalar_matrix(0.0); };
    p.control_update = [](double, const Vector&, const Vector& lambda) { return lambda; };
    p.box = Box::unbounded(1);
}

} // namespace

BuiltinProblem linear_lq()
{
    OCProblem p;
    p.horizon = 1.0;
    p.x0 = scalar(1.0);
    quadratic_cost(p);
    p.f = [](double, const Vector& x, const Vector& u) { return Vector(u - x); };
    p.fx = [](double, const Vector&, const Vector&) { return scalar_matrix(-1.0); };
    p.fxx = [](double, const Vector&, const Vector&, const Vector&) { return scalar_matrix(0.0); };

    const double s2 = std::sqrt(2.0);
    const double den = s2 * std::cosh(s2) + std::sinh(s2);
    TimeFunction x = [s2, den](double t) {
        return scalar((s2 * std::cosh(s2 * (t - 1.0)) - std::sinh(s2 * (t - 1.0))) / den);
    };
    TimeFunction u = [s2, den](double t) { return scalar(std::sinh(s2 * (t - 1.0)) / den); };
    return {"linear-lq", std::move(p), x, u, u, std::nullopt};
}

BuiltinProblem nonlinear_quadratic()
{
    OCProblem p;
    p.horizon = 0.2;
    p.x0 = scalar(2.0);
    quadratic_cost(p);
    p.f = [](double, const Vector& x, const Vector& u) { return scalar(x(0) * x(0) + u(0)); };
    p.fx = [](double, const Vector& x, const Vector&) { return scalar_matrix(2.0 * x(0)); };
    p.fxx = [](double, const Vector&, const Vector&, const Vector& mu) { return scalar_matrix(2.0 * mu(0)); };
    p.fx_frozen = [](double, const Vector& x, const Vector&) { return scalar_matrix(x(0)); };
    return {"nonlinear-quadratic", std::move(p), std::nullopt, std::nullopt, std::nullopt, SelfRefined{}};
}

BuiltinProblem polynomial_check()
{
    OCProblem p;
    p.horizon = 1.0;
    p.x0 = scalar(1.0);
    p.f = [](double, const Vector&, const Vector& u) { return u; };
    p.g = [](double t, const Vector& x, const Vector& u) {
        const double ex = x(0) - 1.0 - t;
        const double eu = u(0) - 1.0;
        return 0.5 * (ex * ex + eu * eu);
    };
    p.fx = [](double, const Vector&, const Vector&) { return scalar_matrix(0.0); };
    p.fu = [](double, const Vector&, const Vector&) { return scalar_matrix(1.0); };
    p.gx = [](double t, const Vector& x, const Vector&) { return scalar(x(0) - 1.0 - t); };
    p.gu = [](double, const Vector&, const Vector& u) { return scalar(u(0) - 1.0); };
    p.fxx = [](double, const Vector&, const Vector&, const Vector&) { return scalar_matrix(0.0); };
    p.fxu = p.fxx;
    p.fuu = p.fxx;
    p.gxx = [](double, const Vector&, const Vector&) { return scalar_matrix(1.0); };
    p.gxu = [](double, const Vector&, const Vector&) { return scalar_matrix(0.0); };
    p.guu = p.gxx;
    p.control_update = [](double, const Vector&, const Vector& lambda) { return Vector(lambda.array() + 1.0); };
    p.box = Box::unbounded(1);

    TimeFunction x = [](double t) { return scalar(1.0 + t); };
    TimeFunction u = [](double) { return scalar(1.0); };
    TimeFunction lambda = [](double) { return scalar(0.0); };
    return {"polynomial-check", std::move(p), x, u, lambda, std::nullopt};
}

std::vector<std::string> builtin_names()
{
    return {"linear-lq", "nonlinear-quadratic", "polynomial-check"};
}

BuiltinProblem builtin_problem(const std::string& name)
{
    if (name == "linear-lq") {
        return linear_lq();
    }
    if (name == "nonlinear-quadratic") {
        return nonlinear_quadratic();
    }
    if (name == "polynomial-check") {
        return polynomial_check();
    }
    throw std::invalid_argument("unknown problem '" + name + "'");
}

} // namespace dgocp
