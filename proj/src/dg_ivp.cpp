#include "dgocp/dg_ivp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace dgocp {

namespace {

struct IntervalSystem {
    Vector residual;
    Matrix jacobian;
    double scale = 1.0;
};

// Residual and Jacobian of the local DG equations on interval n.
IntervalSystem assemble_interval(const IVPRight& rhs, const IntegrationRule& rule, const Partition& part,
                                 std::size_t n, const Vector& incoming, const Vector& c, int dim, bool want_jacobian)
{
    const std::size_t nb = rule.basis_size();
    const auto d = static_cast<Eigen::Index>(dim);
    const double half = 0.5 * part.width(n);

    IntervalSystem sys;
    sys.residual = Vector::Zero(c.size());
    if (want_jacobian) {
        sys.jacobian = Matrix::Zero(c.size(), c.size());
    }
    auto coeff = [&](std::size_t k) { return c.segment(static_cast<Eigen::Index>(k) * d, d); };

    Vector left = Vector::Zero(d);
    for (std::size_t k = 0; k < nb; ++k) {
        left += (k % 2 == 0 ? 1.0 : -1.0) * coeff(k);
    }
    const Vector jump = left - incoming;
    sys.scale = std::max(1.0, incoming.lpNorm<Eigen::Infinity>());

    for (std::size_t j = 0; j < nb; ++j) {
        auto r = sys.residual.segment(static_cast<Eigen::Index>(j) * d, d);
        for (std::size_t k = 0; k < nb; ++k) {
            r += rule.stiffness(j, k) * coeff(k);
        }
        r += (j % 2 == 0 ? 1.0 : -1.0) * jump;
    }
    if (want_jacobian) {
        for (std::size_t j = 0; j < nb; ++j) {
            for (std::size_t k = 0; k < nb; ++k) {
                const double pj = j % 2 == 0 ? 1.0 : -1.0;
                const double pk = k % 2 == 0 ? 1.0 : -1.0;
                sys.jacobian.block(static_cast<Eigen::Index>(j) * d, static_cast<Eigen::Index>(k) * d, d, d)
                    .diagonal()
                    .array() += rule.stiffness(j, k) + pj * pk;
            }
        }
    }

    for (std::size_t p = 0; p < rule.size(); ++p) {
        const double xi = rule.point(p);
        const TimePoint point{part.time_at(n, xi), n, xi};
        Vector x = Vector::Zero(d);
        for (std::size_t k = 0; k < nb; ++k) {
            x += rule.basis(p, k) * coeff(k);
        }
        const Vector f = rhs.value(point, x);
        sys.scale = std::max(sys.scale, half * f.lpNorm<Eigen::Infinity>());
        Matrix jf;
        if (want_jacobian) {
            jf = rhs.jacobian(point, x);
        }
        for (std::size_t j = 0; j < nb; ++j) {
            const double w = half * rule.load_weight(j, p);
            if (w == 0.0) {
                continue;
            }
            sys.residual.segment(static_cast<Eigen::Index>(j) * d, d) -= w * f;
            if (want_jacobian) {
                for (std::size_t k = 0; k < nb; ++k) {
                    sys.jacobian.block(static_cast<Eigen::Index>(j) * d, static_cast<Eigen::Index>(k) * d, d, d) -=
                        (w * rule.basis(p, k)) * jf;
                }
            }
        }
    }
    return sys;
}

void emit_warning(const NewtonOptions& opts, const std::string& msg)
{
    if (opts.warn) {
        opts.warn(msg);
    } else {
        std::clog << "warning: " << msg << '\n';
    }
}

} // namespace

SolverFailure::SolverFailure(std::size_t interval, double residual)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "DG Newton solve did not converge on interval " << interval << " (residual " << residual << ")";
          return os.str();
      }()),
      interval_(interval), residual_(residual)
{
}

DGFunction solve_forward(const IVPRight& rhs, const Vector& x0, const Partition& partition,
                         const Discretization& disc, const NewtonOptions& opts)
{
    if (!(opts.tol > 0.0) || opts.max_iter < 1) {
        throw std::invalid_argument("NewtonOptions: need tol > 0 and max_iter >= 1");
    }
    const int dim = static_cast<int>(x0.size());
    const IntegrationRule rule = disc.rule();
    const std::size_t nb = rule.basis_size();
    DGFunction x(partition, disc.order, dim);

    if (rhs.lipschitz_bound && partition.max_width() * *rhs.lipschitz_bound >= 1.0) {
        std::ostringstream os;
        os << "h L = " << partition.max_width() * *rhs.lipschitz_bound
           << " >= 1; DG solvability is not guaranteed by the Lipschitz bound";
        emit_warning(opts, os.str());
    }

    Vector incoming = x0;
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        // constant extension of the incoming trace
        Vector c = Vector::Zero(static_cast<Eigen::Index>(nb) * dim);
        c.head(dim) = incoming;

        auto sys = assemble_interval(rhs, rule, partition, n, incoming, c, dim, true);
        double res = sys.residual.lpNorm<Eigen::Infinity>();
        int iterations = 0;
        while (!(res <= opts.tol * sys.scale)) {
            if (iterations++ >= opts.max_iter) {
                throw SolverFailure(n, res);
            }
            const Vector step = sys.jacobian.partialPivLu().solve(-sys.residual);
            double alpha = opts.damping;
            while (true) {
                const Vector candidate = c + alpha * step;
                auto trial = assemble_interval(rhs, rule, partition, n, incoming, candidate, dim, true);
                const double trial_res = trial.residual.lpNorm<Eigen::Infinity>();
                if (std::isfinite(trial_res) && (trial_res < res || alpha <= opts.min_damping)) {
                    c = candidate;
                    sys = std::move(trial);
                    res = trial_res;
                    break;
                }
                if (alpha <= opts.min_damping) {
                    throw SolverFailure(n, trial_res);
                }
                alpha *= 0.5;
            }
        }
        // Up to two undamped steps past tol settle the iterate at round-off level,
        // so nearby solves differ smoothly (finite-difference checks rely on it).
        for (int extra = 0; extra < 2; ++extra) {
            const Vector candidate = c + sys.jacobian.partialPivLu().solve(-sys.residual);
            auto trial = assemble_interval(rhs, rule, partition, n, incoming, candidate, dim, true);
            const double trial_res = trial.residual.lpNorm<Eigen::Infinity>();
            if (!(trial_res < res)) {
                break;
            }
            c = candidate;
            sys = std::move(trial);
            res = trial_res;
        }
        x.block(n) = c;
        incoming = x.eval_local(n, 1.0);
    }
    return x;
}

DGFunction solve_forward(const IVPRight& rhs, const Vector& x0, const Partition& partition, int order,
                         const NewtonOptions& opts)
{
    return solve_forward(rhs, x0, partition, Discretization{order}, opts);
}

IVPRight reverse_time(const IVPRight& rhs, const Partition& partition)
{
    const std::size_t N = partition.intervals();
    auto to_original = [partition, N](const TimePoint& s) {
        const std::size_t n = N - 1 - s.interval;
        return TimePoint{partition.time_at(n, -s.xi), n, -s.xi};
    };
    IVPRight reversed;
    reversed.value = [value = rhs.value, to_original](const TimePoint& s, const Vector& w) -> Vector {
        return -value(to_original(s), w);
    };
    reversed.jacobian = [jacobian = rhs.jacobian, to_original](const TimePoint& s, const Vector& w) -> Matrix {
        return -jacobian(to_original(s), w);
    };
    reversed.lipschitz_bound = rhs.lipschitz_bound;
    return reversed;
}

DGFunction solve_backward(const IVPRight& rhs, const Vector& xT, const Partition& partition,
                          const Discretization& disc, const NewtonOptions& opts)
{
    const Partition rev = partition.reversed();
    const DGFunction w = solve_forward(reverse_time(rhs, partition), xT, rev, disc, opts);
    DGFunction lambda(partition, disc.order, w.dim());
    const std::size_t N = partition.intervals();
    for (std::size_t n = 0; n < N; ++n) {
        for (int k = 0; k <= disc.order; ++k) {
            lambda.coeff(n, k) = (k % 2 == 0 ? 1.0 : -1.0) * w.coeff(N - 1 - n, k);
        }
    }
    return lambda;
}

DGFunction solve_backward(const IVPRight& rhs, const Vector& xT, const Partition& partition, int order,
                          const NewtonOptions& opts)
{
    return solve_backward(rhs, xT, partition, Discretization{order}, opts);
}

std::vector<double> backward_weak_residual(const IVPRight& rhs, const DGFunction& lambda, const Vector& terminal,
                                           const Discretization& disc)
{
    const IntegrationRule rule = disc.rule();
    const Partition& part = lambda.partition();
    const std::size_t N = part.intervals();
    const std::size_t nb = rule.basis_size();
    const auto d = static_cast<Eigen::Index>(lambda.dim());
    std::vector<double> out(lambda.coefficients().size(), 0.0);

    for (std::size_t m = 0; m < N; ++m) {
        const double half = 0.5 * part.width(m);
        std::vector<Vector> f(rule.size());
        for (std::size_t p = 0; p < rule.size(); ++p) {
            const TimePoint point{part.time_at(m, rule.point(p)), m, rule.point(p)};
            f[p] = rhs.value(point, lambda.eval_local(m, rule.point(p)));
        }
        const Vector plus_here = lambda.trace_plus(m);
        for (std::size_t j = 0; j < nb; ++j) {
            const double pj_left = j % 2 == 0 ? 1.0 : -1.0;
            // B(phi, lambda) with phi = P_j on I_m: (phi', lambda)_{I_m} + [phi]_m lambda_m^+ + [phi]_{m+1} lambda_{m+1}^+
            Vector b = Vector::Zero(d);
            for (std::size_t k = 0; k < nb; ++k) {
                b += rule.stiffness(k, j) * lambda.coeff(m, k);
            }
            b += pj_left * plus_here;
            if (m + 1 < N) {
                b -= lambda.trace_plus(m + 1);
            } else {
                // the terminal value enters through phi_N^-
                b -= terminal;
            }
            for (std::size_t p = 0; p < rule.size(); ++p) {
                b += half * rule.load_weight(j, p) * f[p];
            }
            for (Eigen::Index i = 0; i < d; ++i) {
                out[m * lambda.block_size() + j * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = b(i);
            }
        }
    }
    return out;
}

std::vector<double> forward_weak_residual(const IVPRight& rhs, const DGFunction& x, const Vector& initial,
                                          const Discretization& disc)
{
    const IntegrationRule rule = disc.rule();
    const Partition& part = x.partition();
    const std::size_t nb = rule.basis_size();
    const auto d = static_cast<Eigen::Index>(x.dim());
    std::vector<double> out(x.coefficients().size(), 0.0);
    for (std::size_t m = 0; m < part.intervals(); ++m) {
        const double half = 0.5 * part.width(m);
        const Vector incoming = m == 0 ? initial : x.trace_minus(m);
        const Vector jump = x.trace_plus(m) - incoming;
        for (std::size_t j = 0; j < nb; ++j) {
            Vector b = (j % 2 == 0 ? 1.0 : -1.0) * jump;
            for (std::size_t k = 0; k < nb; ++k) {
                b += rule.stiffness(j, k) * x.coeff(m, k);
            }
            for (std::size_t p = 0; p < rule.size(); ++p) {
                const TimePoint point{part.time_at(m, rule.point(p)), m, rule.point(p)};
                b -= half * rule.load_weight(j, p) * rhs.value(point, x.eval_local(m, rule.point(p)));
            }
            for (Eigen::Index i = 0; i < d; ++i) {
                out[m * x.block_size() + j * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] = b(i);
            }
        }
    }
    return out;
}

double jacobian_discrepancy(const IVPRight& rhs, int dim, double horizon, std::mt19937_64& rng, int probes)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> time(0.0, horizon);
    double worst = 0.0;
    for (int probe = 0; probe < probes; ++probe) {
        const double t = time(rng);
        const TimePoint point{t, 0, 0.0};
        Vector x(dim);
        for (int i = 0; i < dim; ++i) {
            x(i) = unit(rng);
        }
        const Matrix jac = rhs.jacobian(point, x);
        Matrix fd(jac.rows(), dim);
        for (int i = 0; i < dim; ++i) {
            const double eps = 1e-6 * std::max(1.0, std::abs(x(i)));
            Vector xp = x;
            Vector xm = x;
            xp(i) += eps;
            xm(i) -= eps;
            fd.col(i) = (rhs.value(point, xp) - rhs.value(point, xm)) / (2.0 * eps);
        }
        const double scale = std::max(1.0, jac.lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (fd - jac).lpNorm<Eigen::Infinity>() / scale);
    }
    return worst;
}

} // namespace dgocp
