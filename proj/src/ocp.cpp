#include "dgocp/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgocp {

void OCProblem::validate() const
{
    if (state_dim < 1 || control_dim < 1) {
        throw std::invalid_argument("OCProblem: dimensions must be positive");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("OCProblem: horizon must be positive");
    }
    if (x0.size() != state_dim) {
        throw std::invalid_argument("OCProblem: x0 has wrong dimension");
    }
    if (!f || !g || !fx || !fu || !gx || !gu) {
        throw std::invalid_argument("OCProblem: f, g and their first partials are required");
    }
    if (box.lower.size() != control_dim || box.upper.size() != control_dim) {
        throw std::invalid_argument("OCProblem: box bounds have wrong dimension");
    }
    for (int i = 0; i < control_dim; ++i) {
        if (box.lower(i) > box.upper(i)) {
            throw std::invalid_argument("OCProblem: u_lo > u_hi in component " + std::to_string(i));
        }
    }
}

bool OCProblem::has_second_derivatives() const
{
    return fxx && fxu && fuu && gxx && gxu && guu;
}

namespace {

Vector random_vector(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = unit(rng);
    }
    return v;
}

// Central-difference Jacobian of fn at z.
template <typename Fn>
Matrix fd_jacobian(const Fn& fn, const Vector& z)
{
    const Vector base = fn(z);
    Matrix out(base.size(), z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double eps = 1e-6 * std::max(1.0, std::abs(z(i)));
        Vector zp = z;
        Vector zm = z;
        zp(i) += eps;
        zm(i) -= eps;
        out.col(i) = (fn(zp) - fn(zm)) / (2.0 * eps);
    }
    return out;
}

double relative(const Matrix& supplied, const Matrix& fd)
{
    return (supplied - fd).lpNorm<Eigen::Infinity>() / std::max(1.0, supplied.lpNorm<Eigen::Infinity>());
}

Vector as_vector(double v)
{
    return Vector::Constant(1, v);
}

} // namespace

double derivative_discrepancy(const OCProblem& p, std::mt19937_64& rng, int probes)
{
    std::uniform_real_distribution<double> time(0.0, p.horizon);
    double worst = 0.0;
    for (int probe = 0; probe < probes; ++probe) {
        const double t = time(rng);
        const Vector x = p.x0 + 0.5 * random_vector(p.state_dim, rng);
        const Vector u = random_vector(p.control_dim, rng);
        const Vector mu = random_vector(p.state_dim, rng);

        auto f_of_x = [&](const Vector& z) { return p.f(t, z, u); };
        auto f_of_u = [&](const Vector& z) { return p.f(t, x, z); };
        auto g_of_x = [&](const Vector& z) { return as_vector(p.g(t, z, u)); };
        auto g_of_u = [&](const Vector& z) { return as_vector(p.g(t, x, z)); };
        worst = std::max(worst, relative(p.fx(t, x, u), fd_jacobian(f_of_x, x)));
        worst = std::max(worst, relative(p.fu(t, x, u), fd_jacobian(f_of_u, u)));
        worst = std::max(worst, relative(p.gx(t, x, u).transpose(), fd_jacobian(g_of_x, x)));
        worst = std::max(worst, relative(p.gu(t, x, u).transpose(), fd_jacobian(g_of_u, u)));

        if (p.has_second_derivatives()) {
            auto fxmu_of_x = [&](const Vector& z) -> Vector { return p.fx(t, z, u).transpose() * mu; };
            auto fxmu_of_u = [&](const Vector& z) -> Vector { return p.fx(t, x, z).transpose() * mu; };
            auto fumu_of_u = [&](const Vector& z) -> Vector { return p.fu(t, x, z).transpose() * mu; };
            auto gx_of_x = [&](const Vector& z) { return p.gx(t, z, u); };
            auto gx_of_u = [&](const Vector& z) { return p.gx(t, x, z); };
            auto gu_of_u = [&](const Vector& z) { return p.gu(t, x, z); };
            worst = std::max(worst, relative(p.fxx(t, x, u, mu), fd_jacobian(fxmu_of_x, x)));
            worst = std::max(worst, relative(p.fxu(t, x, u, mu), fd_jacobian(fxmu_of_u, u)));
            worst = std::max(worst, relative(p.fuu(t, x, u, mu), fd_jacobian(fumu_of_u, u)));
            worst = std::max(worst, relative(p.gxx(t, x, u), fd_jacobian(gx_of_x, x)));
            worst = std::max(worst, relative(p.gxu(t, x, u), fd_jacobian(gx_of_u, u)));
            worst = std::max(worst, relative(p.guu(t, x, u), fd_jacobian(gu_of_u, u)));
        }
    }
    return worst;
}

DGFunction solve_state(const OCProblem& p, const ControlFunction& u, const Partition& partition,
                       const Discretization& disc, const NewtonOptions& opts)
{
    IVPRight rhs;
    rhs.value = [&p, &u](const TimePoint& pt, const Vector& x) { return p.f(pt.t, x, u.eval(pt)); };
    rhs.jacobian = [&p, &u](const TimePoint& pt, const Vector& x) { return p.fx(pt.t, x, u.eval(pt)); };
    return solve_forward(rhs, p.x0, partition, disc, opts);
}

IVPRight adjoint_rhs(const OCProblem& p, const ControlFunction& u, const DGFunction& x, AdjointJacobian jacobian)
{
    if (jacobian == AdjointJacobian::frozen && !p.fx_frozen) {
        throw std::invalid_argument("adjoint_rhs: problem has no frozen-coefficient Jacobian");
    }
    const OCProblem::MatrixField& fx = jacobian == AdjointJacobian::frozen ? p.fx_frozen : p.fx;
    IVPRight rhs;
    rhs.value = [&p, &u, &x, &fx](const TimePoint& pt, const Vector& lambda) -> Vector {
        const Vector xs = x.eval(pt);
        const Vector us = u.eval(pt);
        return -fx(pt.t, xs, us).transpose() * lambda + p.gx(pt.t, xs, us);
    };
    rhs.jacobian = [&u, &x, &fx](const TimePoint& pt, const Vector&) -> Matrix {
        return -fx(pt.t, x.eval(pt), u.eval(pt)).transpose();
    };
    return rhs;
}

DGFunction solve_adjoint(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                         const Discretization& disc, const NewtonOptions& opts, AdjointJacobian jacobian)
{
    return solve_backward(adjoint_rhs(p, u, x, jacobian), Vector::Zero(p.state_dim), x.partition(), disc, opts);
}

PointField reduced_gradient(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                            const DGFunction& lambda)
{
    return [&p, u, x, lambda](const TimePoint& pt) -> Vector {
        const Vector xs = x.eval(pt);
        const Vector us = u.eval(pt);
        return p.gu(pt.t, xs, us) - p.fu(pt.t, xs, us).transpose() * lambda.eval(pt);
    };
}

double pair(const PointField& a, const PointField& b, const Partition& partition, const Discretization& disc)
{
    const IntegrationRule rule = disc.rule();
    double sum = 0.0;
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        const double half = 0.5 * partition.width(n);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const TimePoint pt{partition.time_at(n, rule.point(q)), n, rule.point(q)};
            sum += half * rule.weight(q) * a(pt).dot(b(pt));
        }
    }
    return sum;
}

double directional_derivative(const PointField& gradient, const ControlFunction& v, const Partition& partition,
                              const Discretization& disc)
{
    return pair(gradient, [&v](const TimePoint& pt) { return v.eval(pt); }, partition, disc);
}

double cost(const OCProblem& p, const ControlFunction& u, const DGFunction& x, const Discretization& disc)
{
    const IntegrationRule rule = disc.rule();
    const Partition& part = x.partition();
    double sum = 0.0;
    for (std::size_t n = 0; n < part.intervals(); ++n) {
        const double half = 0.5 * part.width(n);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const TimePoint pt{part.time_at(n, rule.point(q)), n, rule.point(q)};
            sum += half * rule.weight(q) * p.g(pt.t, x.eval_local(n, rule.point(q)), u.eval(pt));
        }
    }
    return sum;
}

DGFunction tangent_solve(const OCProblem& p, const ControlFunction& u, const DGFunction& x,
                         const ControlFunction& v, const Discretization& disc, const NewtonOptions& opts)
{
    IVPRight rhs;
    rhs.value = [&](const TimePoint& pt, const Vector& y) -> Vector {
        const Vector xs = x.eval(pt);
        const Vector us = u.eval(pt);
        return p.fx(pt.t, xs, us) * y + p.fu(pt.t, xs, us) * v.eval(pt);
    };
    rhs.jacobian = [&](const TimePoint& pt, const Vector&) -> Matrix { return p.fx(pt.t, x.eval(pt), u.eval(pt)); };
    return solve_forward(rhs, Vector::Zero(p.state_dim), x.partition(), disc, opts);
}

double hessian_form(const OCProblem& p, const ControlFunction& u, const ControlFunction& v,
                    const Partition& partition, const Discretization& disc, const NewtonOptions& opts)
{
    if (!p.has_second_derivatives()) {
        throw std::invalid_argument("hessian_form: problem lacks second partial derivatives");
    }
    const DGFunction x = solve_state(p, u, partition, disc, opts);
    const DGFunction lambda = solve_adjoint(p, u, x, disc, opts);
    const DGFunction y = tangent_solve(p, u, x, v, disc, opts);

    const IntegrationRule rule = disc.rule();
    double sum = 0.0;
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        const double half = 0.5 * partition.width(n);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double xi = rule.point(q);
            const TimePoint pt{partition.time_at(n, xi), n, xi};
            const Vector xs = x.eval_local(n, xi);
            const Vector us = u.eval(pt);
            const Vector vs = v.eval(pt);
            const Vector ys = y.eval_local(n, xi);
            const Vector ls = lambda.eval_local(n, xi);
            const double state_part = -(ys.dot(p.fxx(pt.t, xs, us, ls) * ys) + 2.0 * ys.dot(p.fxu(pt.t, xs, us, ls) * vs) +
                                        vs.dot(p.fuu(pt.t, xs, us, ls) * vs));
            const double cost_part = ys.dot(p.gxx(pt.t, xs, us) * ys) + 2.0 * ys.dot(p.gxu(pt.t, xs, us) * vs) +
                                     vs.dot(p.guu(pt.t, xs, us) * vs);
            sum += half * rule.weight(q) * (state_part + cost_part);
        }
    }
    return sum;
}

double adjoint_residual(const OCProblem& p, const ControlFunction& u, const DGFunction& x, const DGFunction& lambda,
                        const Discretization& disc)
{
    const auto res = backward_weak_residual(adjoint_rhs(p, u, x), lambda, Vector::Zero(p.state_dim), disc);
    double worst = 0.0;
    for (double r : res) {
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ReducedEvaluation evaluate(const OCProblem& p, const ControlFunction& u, const Partition& partition,
                           const Discretization& disc, const NewtonOptions& opts)
{
    DGFunction x = solve_state(p, u, partition, disc, opts);
    DGFunction lambda = solve_adjoint(p, u, x, disc, opts);
    const double j = cost(p, u, x, disc);
    PointField grad = reduced_gradient(p, u, x, lambda);
    return ReducedEvaluation{u, std::move(x), std::move(lambda), j, std::move(grad)};
}

double reduced_cost(const OCProblem& p, const ControlFunction& u, const Partition& partition,
                    const Discretization& disc, const NewtonOptions& opts)
{
    return cost(p, u, solve_state(p, u, partition, disc, opts), disc);
}

} // namespace dgocp
