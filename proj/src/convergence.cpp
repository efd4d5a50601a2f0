#include "dgocp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <stdexcept>

namespace dgocp {

StudyOptions table_preset(const BuiltinProblem& problem)
{
    StudyOptions opts;
    if (problem.name == "nonlinear-quadratic") {
        opts.integration = IntegrationKind::nodal;
        opts.sweep_adjoint = AdjointJacobian::frozen;
        opts.norm = ErrorNorm::nodal_skip_last;
    }
    return opts;
}

std::optional<double> observed_rate(double coarse, double fine)
{
    if (!(coarse > round_off_floor) || !(fine > round_off_floor)) {
        return std::nullopt;
    }
    return std::log2(coarse / fine);
}

namespace {

struct Solution {
    DGFunction x;
    DGFunction u;
    int iterations = 0;
    bool converged = false;
};

OptimizeOptions optimizer_options(const StudyOptions& s)
{
    OptimizeOptions o;
    o.method = s.method;
    o.grad_tol = s.grad_tol;
    o.max_outer = s.max_outer;
    o.integration = s.integration;
    o.quad_points = s.quad_points;
    o.sweep_adjoint = s.sweep_adjoint;
    return o;
}

std::size_t intervals_for(double horizon, double h)
{
    const double n = horizon / h;
    const auto rounded = static_cast<std::size_t>(std::llround(n));
    if (rounded < 1 || std::abs(n - static_cast<double>(rounded)) > 1e-9 * n) {
        throw std::invalid_argument("mesh width does not divide the horizon");
    }
    return rounded;
}

Solution solve_level(const OCProblem& p, int r, double h, const StudyOptions& s)
{
    const Partition part = make_uniform_partition(p.horizon, intervals_for(p.horizon, h));
    const ControlFunction u0(constant_function(part, r, Vector::Zero(p.control_dim)));
    OptimizeReport rep = minimize(p, u0, part, r, r, optimizer_options(s));
    const bool done = s.method == Method::fbs && s.sweep_adjoint == AdjointJacobian::frozen ? rep.sweep_converged
                                                                                              : rep.converged;
    return {std::move(rep.x_star), rep.u_star.dg(), rep.iterations, done};
}

double measure(const DGFunction& f, const SidedFunction& ref, ErrorNorm norm)
{
    switch (norm) {
    case ErrorNorm::nodal:
        return nodal_l2_error(f, ref);
    case ErrorNorm::nodal_skip_last:
        return nodal_l2_error(f, ref, NodalErrorOptions{true});
    case ErrorNorm::gauss:
        break;
    }
    return l2_error(f, [&ref](double t) { return ref(t, Side::right); },
                    gauss_rule(static_cast<std::size_t>(f.degree()) + 4));
}

} // namespace

ConvergenceReport run_study(const BuiltinProblem& problem, const StudyOptions& options)
{
    if (options.orders.empty() || options.levels < 1) {
        throw std::invalid_argument("run_study: need at least one order and one level");
    }
    for (int r : options.orders) {
        if (r < 0) {
            throw std::invalid_argument("run_study: negative order");
        }
    }
    const OCProblem& p = problem.problem;
    p.validate();

    SidedFunction ref_x;
    SidedFunction ref_u;
    std::optional<Solution> reference;
    if (problem.exact_state && problem.exact_control) {
        ref_x = as_sided(*problem.exact_state);
        ref_u = as_sided(*problem.exact_control);
    } else {
        SelfRefined ref_spec = options.reference ? *options.reference
                                             : problem.reference.value_or(SelfRefined{});
        if (ref_spec.r == 0) {
            ref_spec.r = *std::max_element(options.orders.begin(), options.orders.end());
        }
        reference = solve_level(p, ref_spec.r, ref_spec.h, options);
        if (!reference->converged) {
            return {{}, "reference solve did not converge"};
        }
        ref_x = as_sided(reference->x);
        ref_u = as_sided(reference->u);
    }

    struct Job {
        int r;
        int level;
        double h;
    };
    std::vector<Job> jobs;
    for (int r : options.orders) {
        for (int k = 0; k < options.levels; ++k) {
            jobs.push_back({r, k, options.h0 * std::ldexp(1.0, -k)});
        }
    }

    auto run = [&](const Job& job) {
        const Solution sol = solve_level(p, job.r, job.h, options);
        ConvergenceRow row;
        row.r = job.r;
        row.h = job.h;
        row.err_x = measure(sol.x, ref_x, options.norm);
        row.err_u = measure(sol.u, ref_u, options.norm);
        row.iterations = sol.iterations;
        row.converged = sol.converged;
        return row;
    };

    std::vector<std::optional<ConvergenceRow>> rows(jobs.size());
    std::vector<std::string> errors(jobs.size());
    auto guarded = [&](std::size_t i) {
        try {
            rows[i] = run(jobs[i]);
        } catch (const StallError& e) {
            errors[i] = e.what();
        }
    };
    if (options.parallel) {
        std::vector<std::future<void>> pending;
        pending.reserve(jobs.size());
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            pending.push_back(std::async(std::launch::async, guarded, i));
        }
        for (auto& f : pending) {
            f.get();
        }
    } else {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            guarded(i);
        }
    }

    ConvergenceReport report;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!rows[i]) {
            report.failure = errors[i];
            break;
        }
        ConvergenceRow row = *rows[i];
        if (jobs[i].level > 0) {
            const ConvergenceRow& prev = report.rows.back();
            row.rate_x = observed_rate(prev.err_x, row.err_x);
            row.rate_u = observed_rate(prev.err_u, row.err_u);
        }
        report.rows.push_back(row);
    }
    return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report)
{
    auto rate = [](const std::optional<double>& v) {
        if (!v) {
            return std::string("-");
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", *v);
        return std::string(buf);
    };
    out << "r,h,err_x,err_u,rate_x,rate_u\n";
    for (const auto& row : report.rows) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.4e,%.4e,", row.r, row.h, row.err_x, row.err_u);
        out << buf << rate(row.rate_x) << ',' << rate(row.rate_u) << '\n';
    }
}

} // namespace dgocp
