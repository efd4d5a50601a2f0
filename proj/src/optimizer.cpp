#include "dgocp/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dgocp {

void OptimizeOptions::validate() const
{
    if (!(grad_tol > 0.0) || !(step0 > 0.0) || !(armijo_c > 0.0) || !(min_step > 0.0)) {
        throw std::invalid_argument("OptimizeOptions: tolerances and steps must be positive");
    }
    if (!(fbs_relax > 0.0) || fbs_relax > 1.0) {
        throw std::invalid_argument("OptimizeOptions: fbs_relax must lie in (0, 1]");
    }
    if (max_outer < 0) {
        throw std::invalid_argument("OptimizeOptions: max_outer must be non-negative");
    }
}

StallError::StallError(const std::string& what, int iteration, double cost, double stationarity)
    : std::runtime_error(what), iteration_(iteration), cost_(cost), stationarity_(stationarity)
{
}

namespace {

using ColMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

// Interval block viewed as d x (r + 1): column k holds the degree-k coefficient.
Eigen::Map<ColMatrix> block_matrix(DGFunction& f, std::size_t n)
{
    return {f.coefficients().data() + n * f.block_size(), f.dim(), f.degree() + 1};
}

Eigen::Map<const ColMatrix> block_matrix(const DGFunction& f, std::size_t n)
{
    return {f.coefficients().data() + n * f.block_size(), f.dim(), f.degree() + 1};
}

// V(i, k) = P_k at the Gauss nodes with degree + 1 points.
Matrix gauss_vandermonde(int degree)
{
    const QuadratureRule rule = gauss_rule(static_cast<std::size_t>(degree) + 1);
    Matrix v(degree + 1, degree + 1);
    for (int i = 0; i <= degree; ++i) {
        for (int k = 0; k <= degree; ++k) {
            v(i, k) = legendre_eval(k, rule.points[i]);
        }
    }
    return v;
}

double sup_difference(const DGFunction& a, const DGFunction& b, const IntegrationRule& rule)
{
    double worst = 0.0;
    for (std::size_t n = 0; n < a.intervals(); ++n) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double xi = rule.point(q);
            worst = std::max(worst, (a.eval_local(n, xi) - b.eval_local(n, xi)).lpNorm<Eigen::Infinity>());
        }
    }
    return worst;
}

// Cost differences below this are quadrature and solver round-off.
double round_off_allowance(double j, std::size_t samples)
{
    return 32.0 * std::numeric_limits<double>::epsilon() * std::abs(j) * std::sqrt(static_cast<double>(samples));
}

Vector control_residual(const OCProblem& p, double t, const Vector& x, const Vector& lambda, const Vector& w)
{
    return p.gu(t, x, w) - p.fu(t, x, w).transpose() * lambda;
}

Matrix control_jacobian(const OCProblem& p, double t, const Vector& x, const Vector& lambda, const Vector& w)
{
    if (p.has_second_derivatives()) {
        return p.guu(t, x, w) - p.fuu(t, x, w, lambda);
    }
    Matrix jac(p.control_dim, p.control_dim);
    for (int i = 0; i < p.control_dim; ++i) {
        const double eps = 1e-7 * std::max(1.0, std::abs(w(i)));
        Vector wp = w;
        Vector wm = w;
        wp(i) += eps;
        wm(i) -= eps;
        jac.col(i) = (control_residual(p, t, x, lambda, wp) - control_residual(p, t, x, lambda, wm)) / (2.0 * eps);
    }
    return jac;
}

// Pointwise u_hat solving g_u - f_u^T lambda = 0, starting from u.
Vector pointwise_update(const OCProblem& p, double t, const Vector& x, const Vector& lambda, const Vector& u)
{
    if (p.control_update) {
        return p.control_update(t, x, lambda);
    }
    Vector w = u;
    for (int it = 0; it < 50; ++it) {
        const Vector s = control_residual(p, t, x, lambda, w);
        if (!s.allFinite()) {
            break;
        }
        if (s.lpNorm<Eigen::Infinity>() <= 1e-12) {
            return w;
        }
        const Eigen::FullPivLU<Matrix> lu(control_jacobian(p, t, x, lambda, w));
        if (!lu.isInvertible()) {
            break;
        }
        w -= lu.solve(s);
    }
    return u - control_residual(p, t, x, lambda, u);
}

// Refines `guess` on every interval to the Galerkin solution of
// (g_u - f_u^T lambda, v) = 0 for all v of the control degree, integrated with `rule`.
void galerkin_update(const OCProblem& p, const DGFunction& x, const DGFunction& lambda, const Partition& partition,
                     const IntegrationRule& rule, DGFunction& guess)
{
    const int m = p.control_dim;
    const int nb = guess.degree() + 1;
    const auto unknowns = static_cast<Eigen::Index>(m * nb);
    Matrix basis(rule.size(), nb);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        for (int k = 0; k < nb; ++k) {
            basis(static_cast<Eigen::Index>(q), k) = legendre_eval(k, rule.point(q));
        }
    }
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        auto c = block_matrix(guess, n);
        for (int it = 0; it < 30; ++it) {
            Vector res = Vector::Zero(unknowns);
            Matrix jac = Matrix::Zero(unknowns, unknowns);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double xi = rule.point(q);
                const TimePoint pt{partition.time_at(n, xi), n, xi};
                const Vector xs = x.eval(pt);
                const Vector ls = lambda.eval(pt);
                const Vector w = c * basis.row(static_cast<Eigen::Index>(q)).transpose();
                const Vector s = control_residual(p, pt.t, xs, ls, w);
                const Matrix ds = control_jacobian(p, pt.t, xs, ls, w);
                for (int k = 0; k < nb; ++k) {
                    const double wk = rule.weight(q) * basis(static_cast<Eigen::Index>(q), k);
                    res.segment(k * m, m) += wk * s;
                    for (int l = 0; l < nb; ++l) {
                        jac.block(k * m, l * m, m, m) += wk * basis(static_cast<Eigen::Index>(q), l) * ds;
                    }
                }
            }
            if (!res.allFinite() || res.lpNorm<Eigen::Infinity>() <= 1e-15) {
                break;
            }
            const Eigen::FullPivLU<Matrix> lu(jac);
            if (!lu.isInvertible()) {
                break;
            }
            const Vector step = lu.solve(res);
            for (int k = 0; k < nb; ++k) {
                c.col(k) -= step.segment(k * m, m);
            }
            if (step.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, c.lpNorm<Eigen::Infinity>())) {
                break;
            }
        }
    }
}

struct State {
    DGFunction u;
    DGFunction x;
    DGFunction lambda;
    double cost = 0.0;
};

class Logger {
public:
    explicit Logger(const std::string& path)
    {
        if (!path.empty()) {
            out_.open(path);
            if (!out_) {
                throw std::runtime_error("cannot open optimizer log " + path);
            }
            out_ << "iter,cost,stationarity,step\n";
            out_.precision(17);
        }
    }

    void row(int iter, double cost, double stat, double step)
    {
        if (out_.is_open()) {
            out_ << iter << ',' << cost << ',' << stat << ',' << step << '\n';
        }
    }

private:
    std::ofstream out_;
};

} // namespace

DGFunction fit_to_space(const PointField& field, const Partition& partition, int degree, int dim,
                        const IntegrationRule& rule)
{
    if (rule.size() < static_cast<std::size_t>(degree) + 1) {
        throw std::invalid_argument("fit_to_space: rule has fewer points than the space dimension");
    }
    const auto q = static_cast<Eigen::Index>(rule.size());
    Matrix a(q, degree + 1);
    Vector sw(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        sw(i) = std::sqrt(rule.weight(i));
        for (int k = 0; k <= degree; ++k) {
            a(i, k) = sw(i) * legendre_eval(k, rule.point(i));
        }
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(a);
    DGFunction out(partition, degree, dim);
    Matrix rhs(q, dim);
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        for (Eigen::Index i = 0; i < q; ++i) {
            const double xi = rule.point(i);
            rhs.row(i) = sw(i) * field(TimePoint{partition.time_at(n, xi), n, xi}).transpose();
        }
        block_matrix(out, n) = qr.solve(rhs).transpose();
    }
    return out;
}

DGFunction project_to_box(const DGFunction& u, const Box& box)
{
    const Matrix v = gauss_vandermonde(u.degree());
    const Matrix v_inv_t = v.inverse().transpose();
    DGFunction out = u;
    for (std::size_t n = 0; n < u.intervals(); ++n) {
        auto c = block_matrix(out, n);
        Matrix values = c * v.transpose();
        bool changed = false;
        for (Eigen::Index i = 0; i < values.cols(); ++i) {
            const Vector clamped = box.project(values.col(i));
            if (clamped != values.col(i)) {
                values.col(i) = clamped;
                changed = true;
            }
        }
        if (changed) {
            c = values * v_inv_t;
        }
    }
    return out;
}

bool within_box(const DGFunction& u, const Box& box, double slack)
{
    const Matrix v = gauss_vandermonde(u.degree());
    for (std::size_t n = 0; n < u.intervals(); ++n) {
        const Matrix values = block_matrix(u, n) * v.transpose();
        for (Eigen::Index i = 0; i < values.cols(); ++i) {
            if (!box.contains(values.col(i), slack)) {
                return false;
            }
        }
    }
    return true;
}

double stationarity(const OCProblem& p, const ReducedEvaluation& eval, const Partition& partition,
                    const Discretization& disc)
{
    const IntegrationRule rule = disc.rule();
    double worst = 0.0;
    if (eval.u.is_piecewise() && eval.u.dg().partition().same_nodes(partition) &&
        rule.size() > static_cast<std::size_t>(eval.u.dg().degree())) {
        // Discrete controls: the gradient's representative in the control space, checked at the control nodes.
        const DGFunction& u = eval.u.dg();
        const DGFunction g = fit_to_space(eval.gradient, partition, u.degree(), u.dim(), rule);
        const QuadratureRule nodes = gauss_rule(static_cast<std::size_t>(u.degree()) + 1);
        for (std::size_t n = 0; n < partition.intervals(); ++n) {
            for (double xi : nodes.points) {
                const Vector un = u.eval_local(n, xi);
                const Vector step = un - p.box.project(un - g.eval_local(n, xi));
                worst = std::max(worst, step.lpNorm<Eigen::Infinity>());
            }
        }
        return worst;
    }
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double xi = rule.point(q);
            const TimePoint pt{partition.time_at(n, xi), n, xi};
            const Vector u = eval.u.eval(pt);
            const Vector step = u - p.box.project(u - eval.gradient(pt));
            worst = std::max(worst, step.lpNorm<Eigen::Infinity>());
        }
    }
    return worst;
}

double stationarity(const OCProblem& p, const ControlFunction& u, const Partition& partition, int r,
                    const OptimizeOptions& opts)
{
    const Discretization disc{r, opts.integration, opts.quad_points};
    return stationarity(p, evaluate(p, u, partition, disc, opts.newton), partition, disc);
}

OptimizeReport minimize(const OCProblem& p, const ControlFunction& u0, const Partition& partition, int r_state,
                        int r_control, const OptimizeOptions& opts)
{
    p.validate();
    opts.validate();
    if (r_control < 0 || r_control > r_state) {
        throw std::invalid_argument("minimize: control degree must lie in [0, state degree]");
    }
    if (opts.method == Method::fbs && opts.sweep_adjoint == AdjointJacobian::frozen && !p.fx_frozen) {
        throw std::invalid_argument("minimize: frozen sweep requested but the problem has no fx_frozen");
    }
    const Discretization disc{r_state, opts.integration, opts.quad_points};
    const IntegrationRule rule = disc.rule();
    const std::size_t samples = rule.size() * partition.intervals();

    DGFunction start = (u0.is_piecewise() && u0.dg().degree() == r_control && u0.dg().partition().same_nodes(partition))
                           ? u0.dg()
                           : fit_to_space([&u0](const TimePoint& pt) { return u0.eval(pt); }, partition, r_control,
                                          u0.dim(), rule);
    if (!within_box(start, p.box, 1e-12)) {
        throw std::invalid_argument("minimize: initial control violates the box");
    }
    start = project_to_box(start, p.box);

    const bool frozen = opts.method == Method::fbs && opts.sweep_adjoint == AdjointJacobian::frozen;
    auto complete = [&](DGFunction u, DGFunction x, double j) {
        const ControlFunction cu(u);
        DGFunction lambda = solve_adjoint(p, cu, x, disc, opts.newton,
                                          frozen ? AdjointJacobian::frozen : AdjointJacobian::exact);
        return State{std::move(u), std::move(x), std::move(lambda), j};
    };
    auto state_and_cost = [&](const DGFunction& u) {
        const ControlFunction cu(u);
        DGFunction x = solve_state(p, cu, partition, disc, opts.newton);
        const double j = cost(p, cu, x, disc);
        return std::make_pair(std::move(x), j);
    };
    // Projected-gradient stationarity always uses the exact adjoint.
    auto exact_stationarity = [&](const State& s) {
        const ControlFunction cu(s.u);
        DGFunction lambda = frozen ? solve_adjoint(p, cu, s.x, disc, opts.newton) : s.lambda;
        ReducedEvaluation ev{cu, s.x, lambda, s.cost, reduced_gradient(p, cu, s.x, lambda)};
        return stationarity(p, ev, partition, disc);
    };

    auto [x_start, j_start] = state_and_cost(start);
    State cur = complete(std::move(start), std::move(x_start), j_start);

    Logger log(opts.log_path);
    OptimizeReport report{ControlFunction(cur.u), cur.x, cur.lambda, {}, {}, {}, 0, false, false, 0.0};
    double theta = opts.fbs_relax;
    double last_increment = std::numeric_limits<double>::infinity();

    for (int iter = 0;; ++iter) {
        const double stat = exact_stationarity(cur);
        report.cost_history.push_back(cur.cost);
        report.stationarity_history.push_back(stat);
        report.iterations = iter;
        if (stat <= opts.grad_tol) {
            report.converged = true;
        }
        if (report.converged || report.sweep_converged || iter >= opts.max_outer) {
            log.row(iter, cur.cost, stat, 0.0);
            break;
        }

        const ControlFunction cu(cur.u);
        double taken = 0.0;
        if (opts.method == Method::pgd) {
            const PointField grad = reduced_gradient(p, cu, cur.x, cur.lambda);
            const DGFunction g = fit_to_space(grad, partition, r_control, p.control_dim, rule);
            double alpha = opts.step0;
            for (;;) {
                DGFunction trial = project_to_box(cur.u - alpha * g, p.box);
                const DGFunction diff = trial - cur.u;
                const double slope = directional_derivative(grad, ControlFunction(diff), partition, disc);
                auto [x_trial, j_trial] = state_and_cost(trial);
                if (j_trial <= cur.cost + opts.armijo_c * slope + round_off_allowance(cur.cost, samples)) {
                    cur = complete(std::move(trial), std::move(x_trial), j_trial);
                    taken = alpha;
                    break;
                }
                alpha *= 0.5;
                if (alpha < opts.min_step) {
                    log.row(iter, cur.cost, stat, 0.0);
                    std::ostringstream os;
                    os << "projected gradient stalled at iteration " << iter << ": no Armijo step down to "
                       << opts.min_step << " (cost " << cur.cost << ", stationarity " << stat << ")";
                    throw StallError(os.str(), iter, cur.cost, stat);
                }
            }
        } else {
            DGFunction fitted = fit_to_space(
                [&](const TimePoint& pt) {
                    return pointwise_update(p, pt.t, cur.x.eval(pt), cur.lambda.eval(pt), cu.eval(pt));
                },
                partition, r_control, p.control_dim, rule);
            if (!p.control_update) {
                galerkin_update(p, cur.x, cur.lambda, partition, rule, fitted);
            }
            const DGFunction target = project_to_box(fitted, p.box);
            const double increment = sup_difference(target, cur.u, rule);
            if (frozen) {
                if (increment <= opts.grad_tol) {
                    report.sweep_converged = true;
                }
                if (increment > last_increment && increment > opts.grad_tol) {
                    theta *= 0.5;
                }
                last_increment = increment;
            }
            for (;;) {
                if (theta < opts.min_step) {
                    log.row(iter, cur.cost, stat, 0.0);
                    std::ostringstream os;
                    os << "forward-backward sweep stalled at iteration " << iter << ": relaxation below "
                       << opts.min_step << " (cost " << cur.cost << ", stationarity " << stat << ")";
                    throw StallError(os.str(), iter, cur.cost, stat);
                }
                DGFunction trial = theta == 1.0 ? target : (1.0 - theta) * cur.u + theta * target;
                auto [x_trial, j_trial] = state_and_cost(trial);
                if (frozen || j_trial <= cur.cost + round_off_allowance(cur.cost, samples)) {
                    cur = complete(std::move(trial), std::move(x_trial), j_trial);
                    taken = theta;
                    break;
                }
                theta *= 0.5;
            }
        }
        report.step_history.push_back(taken);
        log.row(iter, report.cost_history.back(), stat, taken);
    }

    report.tv_u = total_variation(cur.u);
    report.u_star = ControlFunction(cur.u);
    report.x_star = std::move(cur.x);
    report.lambda_star = std::move(cur.lambda);
    return report;
}

} // namespace dgocp
