#include "dgocp/verify.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgocp {

namespace {

double rel(double a, double b)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace

DGFunction random_control(const Partition& partition, int degree, int dim, std::mt19937_64& rng, double scale)
{
    std::uniform_real_distribution<double> unit(-scale, scale);
    DGFunction u(partition, degree, dim);
    for (double& c : u.coefficients()) {
        c = unit(rng);
    }
    return u;
}

double gradient_check(const OCProblem& p, const Partition& part, const Discretization& disc, std::mt19937_64& rng,
                      int trials, double eps)
{
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        const DGFunction u = random_control(part, disc.order, p.control_dim, rng);
        const DGFunction v = random_control(part, disc.order, p.control_dim, rng, 1.0);
        const ReducedEvaluation ev = evaluate(p, ControlFunction(u), part, disc);
        const double adjoint = directional_derivative(ev.gradient, ControlFunction(v), part, disc);
        const double jp = reduced_cost(p, ControlFunction(u + eps * v), part, disc);
        const double jm = reduced_cost(p, ControlFunction(u - eps * v), part, disc);
        worst = std::max(worst, rel((jp - jm) / (2.0 * eps), adjoint));
    }
    return worst;
}

double tangent_check(const OCProblem& p, const Partition& part, const Discretization& disc, std::mt19937_64& rng,
                     int trials, double eps)
{
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        const DGFunction u = random_control(part, disc.order, p.control_dim, rng);
        const DGFunction v = random_control(part, disc.order, p.control_dim, rng, 1.0);
        const ControlFunction cu(u);
        const DGFunction x = solve_state(p, cu, part, disc);
        const DGFunction y = tangent_solve(p, cu, x, ControlFunction(v), disc);
        const DGFunction xp = solve_state(p, ControlFunction(u + eps * v), part, disc);
        const DGFunction xm = solve_state(p, ControlFunction(u - eps * v), part, disc);
        const DGFunction fd = (0.5 / eps) * (xp - xm);
        worst = std::max(worst, l2_distance(fd, y) / std::max(l2_norm(y), 1e-300));
    }
    return worst;
}

double hessian_check(const OCProblem& p, const Partition& part, const Discretization& disc, std::mt19937_64& rng,
                     int trials, double eps)
{
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        const DGFunction u = random_control(part, disc.order, p.control_dim, rng);
        const DGFunction v = random_control(part, disc.order, p.control_dim, rng, 1.0);
        const double h = hessian_form(p, ControlFunction(u), ControlFunction(v), part, disc);
        const double j0 = reduced_cost(p, ControlFunction(u), part, disc);
        const double jp = reduced_cost(p, ControlFunction(u + eps * v), part, disc);
        const double jm = reduced_cost(p, ControlFunction(u - eps * v), part, disc);
        worst = std::max(worst, rel((jp - 2.0 * j0 + jm) / (eps * eps), h));
    }
    return worst;
}

double adjoint_residual_check(const OCProblem& p, const Partition& part, const Discretization& disc,
                              std::mt19937_64& rng, int trials)
{
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        const ControlFunction u(random_control(part, disc.order, p.control_dim, rng));
        const DGFunction x = solve_state(p, u, part, disc);
        const DGFunction lambda = solve_adjoint(p, u, x, disc);
        worst = std::max(worst, adjoint_residual(p, u, x, lambda, disc));
    }
    return worst;
}

DGFunction solve_backward_global(const IVPRight& rhs, const Vector& terminal, const Partition& partition,
                                 const Discretization& disc, int dim)
{
    DGFunction probe(partition, disc.order, dim);
    const std::size_t n = probe.coefficients().size();
    const std::vector<double> r0 = backward_weak_residual(rhs, probe, terminal, disc);
    Matrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        probe.coefficients()[j] = 1.0;
        const std::vector<double> rj = backward_weak_residual(rhs, probe, terminal, disc);
        probe.coefficients()[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m(i, j) = rj[i] - r0[i];
        }
    }
    const Vector b = -Eigen::Map<const Vector>(r0.data(), static_cast<Eigen::Index>(n));
    const Vector c = m.partialPivLu().solve(b);
    std::copy(c.data(), c.data() + n, probe.coefficients().begin());
    return probe;
}

double time_reversal_check(const OCProblem& p, const Partition& part, const Discretization& disc,
                           std::mt19937_64& rng, int trials)
{
    double worst = 0.0;
    const Vector zero = Vector::Zero(p.state_dim);
    for (int i = 0; i < trials; ++i) {
        const ControlFunction u(random_control(part, disc.order, p.control_dim, rng));
        const DGFunction x = solve_state(p, u, part, disc);
        const IVPRight rhs = adjoint_rhs(p, u, x);
        const DGFunction backward = solve_backward(rhs, zero, part, disc);
        const DGFunction forward = solve_forward(reverse_time(rhs, part), zero, part.reversed(), disc).reversed();
        const DGFunction global = solve_backward_global(rhs, zero, part, disc, p.state_dim);
        for (std::size_t k = 0; k < backward.coefficients().size(); ++k) {
            const double b = backward.coefficients()[k];
            worst = std::max({worst, std::abs(b - forward.coefficients()[k]), std::abs(b - global.coefficients()[k])});
        }
    }
    return worst;
}

OCProblem corrupt_derivative(OCProblem p, const std::string& which)
{
    if (which == "fx") {
        p.fx = [fx = p.fx](double t, const Vector& x, const Vector& u) -> Matrix { return 1.5 * fx(t, x, u) + Matrix::Identity(x.size(), x.size()); };
    } else if (which == "fu") {
        p.fu = [fu = p.fu](double t, const Vector& x, const Vector& u) -> Matrix { return 1.5 * fu(t, x, u); };
    } else if (which == "gx") {
        p.gx = [gx = p.gx](double t, const Vector& x, const Vector& u) -> Vector { return 1.5 * gx(t, x, u); };
    } else if (which == "gu") {
        p.gu = [gu = p.gu](double t, const Vector& x, const Vector& u) -> Vector { return 1.5 * gu(t, x, u); };
    } else {
        throw std::invalid_argument("corrupt_derivative: expected fx, fu, gx or gu, got '" + which + "'");
    }
    return p;
}

std::vector<CheckResult> run_checks(const OCProblem& p, const VerifyOptions& options)
{
    p.validate();
    const Partition part = make_uniform_partition(p.horizon, options.intervals);
    const Discretization disc{options.order};
    std::mt19937_64 rng(options.seed);
    std::vector<CheckResult> out;
    auto add = [&out](std::string name, double value, double tol) {
        out.push_back({std::move(name), value, tol, value < tol});
    };
    add("gradient", gradient_check(p, part, disc, rng, options.trials), 1e-6);
    add("tangent", tangent_check(p, part, disc, rng, options.trials), 1e-6);
    if (p.has_second_derivatives()) {
        add("hessian", hessian_check(p, part, disc, rng, options.trials), 1e-4);
    }
    add("adjoint_residual", adjoint_residual_check(p, part, disc, rng, options.trials), 1e-10);
    add("time_reversal", time_reversal_check(p, part, disc, rng, options.trials), 1e-12);
    return out;
}

} // namespace dgocp
