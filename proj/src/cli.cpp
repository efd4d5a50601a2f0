#include "dgocp/cli.hpp"

#include "dgocp/convergence.hpp"
#include "dgocp/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace dgocp::cli {

namespace {

const std::map<std::string, Method> method_names{{"pgd", Method::pgd}, {"fbs", Method::fbs}};
const std::map<std::string, IntegrationKind> integration_names{{"gauss", IntegrationKind::gauss},
                                                               {"nodal", IntegrationKind::nodal}};
const std::map<std::string, AdjointJacobian> adjoint_names{{"exact", AdjointJacobian::exact},
                                                           {"frozen", AdjointJacobian::frozen}};
const std::map<std::string, ErrorNorm> norm_names{
    {"nodal", ErrorNorm::nodal}, {"nodal-skip-last", ErrorNorm::nodal_skip_last}, {"gauss", ErrorNorm::gauss}};

std::string sci(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

std::ofstream open_file(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void write_samples(const std::filesystem::path& path, const DGFunction& f, const std::string& label)
{
    std::ofstream out = open_file(path);
    out << 't';
    for (int i = 1; i <= f.dim(); ++i) {
        out << ',' << label << '_' << i;
    }
    out << '\n';
    const double horizon = f.partition().horizon();
    constexpr int samples = 401;
    char buf[64];
    for (int s = 0; s < samples; ++s) {
        const double t = s == samples - 1 ? horizon : horizon * s / (samples - 1);
        const Vector v = f.eval(t, Side::left);
        std::snprintf(buf, sizeof buf, "%.10g", t);
        out << buf;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v(i));
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_jumps(const std::filesystem::path& path, const DGFunction& f, const std::string& label)
{
    std::ofstream out = open_file(path);
    out << 't';
    for (int i = 1; i <= f.dim(); ++i) {
        out << ",jump_" << label << '_' << i;
    }
    out << '\n';
    char buf[64];
    for (std::size_t n = 1; n < f.intervals(); ++n) {
        const Vector j = f.jump(n);
        std::snprintf(buf, sizeof buf, "%.10g", f.partition().node(n));
        out << buf;
        for (Eigen::Index i = 0; i < j.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", j(i));
            out << ',' << buf;
        }
        out << '\n';
    }
}

void write_trajectory(const std::filesystem::path& dir, const std::string& stem, const DGFunction& f,
                      const std::string& label)
{
    std::ofstream coeffs = open_file(dir / (stem + ".csv"));
    write_dg_function(coeffs, f);
    write_samples(dir / (stem + "_samples.csv"), f, label);
    write_jumps(dir / (stem + "_jumps.csv"), f, label);
}

std::size_t intervals_from(double horizon, std::size_t intervals, double h)
{
    if (h <= 0.0) {
        return intervals;
    }
    const double n = horizon / h;
    const auto rounded = static_cast<std::size_t>(std::llround(n));
    if (rounded < 1 || std::abs(n - static_cast<double>(rounded)) > 1e-9 * n) {
        throw std::invalid_argument("--h must divide the horizon " + std::to_string(horizon));
    }
    return rounded;
}

struct SolveArgs {
    std::string problem;
    int order = 1;
    int control_order = -1;
    std::size_t intervals = 10;
    double h = 0.0;
    Method method = Method::pgd;
    std::string out_dir = ".";
    double grad_tol = 1e-10;
    int max_iter = 10000;
    std::size_t quad_points = 0;
    IntegrationKind integration = IntegrationKind::gauss;
    AdjointJacobian sweep_adjoint = AdjointJacobian::exact;
};

int do_solve(const SolveArgs& a, std::ostream& out)
{
    const BuiltinProblem bp = builtin_problem(a.problem);
    const OCProblem& p = bp.problem;
    const std::size_t n = intervals_from(p.horizon, a.intervals, a.h);
    const int rc = a.control_order < 0 ? a.order : a.control_order;
    const Partition part = make_uniform_partition(p.horizon, n);

    const std::filesystem::path dir(a.out_dir);
    std::filesystem::create_directories(dir);

    OptimizeOptions opts;
    opts.method = a.method;
    opts.grad_tol = a.grad_tol;
    opts.max_outer = a.max_iter;
    opts.quad_points = a.quad_points;
    opts.integration = a.integration;
    opts.sweep_adjoint = a.sweep_adjoint;
    opts.log_path = (dir / "iterations.csv").string();

    const ControlFunction u0(constant_function(part, rc, Vector::Zero(p.control_dim)));
    const OptimizeReport rep = minimize(p, u0, part, a.order, rc, opts);

    write_trajectory(dir, "u", rep.u_star.dg(), "u");
    write_trajectory(dir, "x", rep.x_star, "x");
    write_trajectory(dir, "lambda", rep.lambda_star, "lambda");

    std::ostringstream s;
    s << "problem=" << bp.name << '\n'
      << "order=" << a.order << '\n'
      << "control_order=" << rc << '\n'
      << "intervals=" << n << '\n'
      << "h=" << sci(p.horizon / static_cast<double>(n), 10) << '\n'
      << "method=" << (a.method == Method::pgd ? "pgd" : "fbs") << '\n'
      << "converged=" << (rep.converged ? "true" : "false") << '\n'
      << "sweep_converged=" << (rep.sweep_converged ? "true" : "false") << '\n'
      << "iterations=" << rep.iterations << '\n'
      << "cost=" << sci(rep.final_cost(), 12) << '\n'
      << "stationarity=" << sci(rep.final_stationarity(), 4) << '\n'
      << "tv_u=" << sci(rep.tv_u, 10) << '\n';
    if (bp.exact_state && bp.exact_control) {
        s << "err_x=" << sci(nodal_l2_error(rep.x_star, as_sided(*bp.exact_state))) << '\n'
          << "err_u=" << sci(nodal_l2_error(rep.u_star.dg(), as_sided(*bp.exact_control))) << '\n';
        const QuadratureRule quad = gauss_rule(static_cast<std::size_t>(a.order) + 4);
        s << "err_x_l2=" << sci(l2_error(rep.x_star, *bp.exact_state, quad)) << '\n'
          << "err_u_l2=" << sci(l2_error(rep.u_star.dg(), *bp.exact_control, quad)) << '\n';
    }
    std::ofstream summary = open_file(dir / "summary.txt");
    summary << s.str();
    out << s.str();
    if (!rep.converged && !rep.sweep_converged) {
        return exit_stall;
    }
    return exit_ok;
}

struct ConvergenceArgs {
    std::string problem;
    std::vector<int> orders{1, 2, 3};
    int levels = 6;
    std::string out_file;
    bool table = false;
    bool serial = false;
    double h_ref = 0.0;
    int r_ref = 0;
    std::optional<Method> method;
    std::optional<double> grad_tol;
    std::optional<IntegrationKind> integration;
    std::optional<AdjointJacobian> sweep_adjoint;
    std::optional<ErrorNorm> norm;
};

int do_convergence(const ConvergenceArgs& a, std::ostream& out, std::ostream& err)
{
    const BuiltinProblem bp = builtin_problem(a.problem);
    StudyOptions opts = a.table ? table_preset(bp) : StudyOptions{};
    opts.orders = a.orders;
    opts.levels = a.levels;
    opts.parallel = !a.serial;
    if (a.method) {
        opts.method = *a.method;
    }
    if (a.grad_tol) {
        opts.grad_tol = *a.grad_tol;
    }
    if (a.integration) {
        opts.integration = *a.integration;
    }
    if (a.sweep_adjoint) {
        opts.sweep_adjoint = *a.sweep_adjoint;
    }
    if (a.norm) {
        opts.norm = *a.norm;
    }
    if (a.h_ref > 0.0 || a.r_ref > 0) {
        SelfRefined ref = bp.reference.value_or(SelfRefined{});
        if (a.h_ref > 0.0) {
            ref.h = a.h_ref;
        }
        ref.r = a.r_ref;
        opts.reference = ref;
    }

    const ConvergenceReport report = run_study(bp, opts);
    if (a.out_file.empty()) {
        write_convergence_csv(out, report);
    } else {
        std::ofstream file = open_file(a.out_file);
        write_convergence_csv(file, report);
    }
    if (!report.failure.empty()) {
        err << "error: " << report.failure << '\n';
        return exit_stall;
    }
    for (const auto& row : report.rows) {
        if (!row.converged) {
            err << "warning: r=" << row.r << " h=" << row.h << " stopped at the iteration cap\n";
        }
    }
    return exit_ok;
}

struct VerifyArgs {
    std::string problem;
    VerifyOptions options;
    std::string corrupt;
};

int do_verify(const VerifyArgs& a, std::ostream& out)
{
    const BuiltinProblem bp = builtin_problem(a.problem);
    const OCProblem p = a.corrupt.empty() ? bp.problem : corrupt_derivative(bp.problem, a.corrupt);
    const std::vector<CheckResult> results = run_checks(p, a.options);
    bool all = true;
    for (const auto& c : results) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << " discrepancy=" << sci(c.discrepancy, 3)
            << " tolerance=" << sci(c.tolerance, 1) << '\n';
        all = all && c.passed;
    }
    return all ? exit_ok : exit_check_failed;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"DG time discretization of ODE optimal control problems"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    const auto problems = CLI::IsMember(builtin_names());

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Optimize one problem on one mesh");
    solve->add_option("--problem", sa.problem, "Built-in problem")->required()->check(problems);
    solve->add_option("--order", sa.order, "State polynomial degree r")->check(CLI::Range(0, 12));
    solve->add_option("--control-order", sa.control_order, "Control degree (default: r)")->check(CLI::Range(0, 12));
    auto* n_opt = solve->add_option("--intervals", sa.intervals, "Number of uniform intervals")->check(CLI::PositiveNumber);
    solve->add_option("--h", sa.h, "Uniform mesh width")->check(CLI::PositiveNumber)->excludes(n_opt);
    solve->add_option("--method", sa.method, "pgd or fbs")->transform(CLI::CheckedTransformer(method_names));
    solve->add_option("--out", sa.out_dir, "Output directory");
    solve->add_option("--grad-tol", sa.grad_tol, "Stationarity tolerance")->check(CLI::PositiveNumber);
    solve->add_option("--max-iter", sa.max_iter, "Outer iteration cap")->check(CLI::NonNegativeNumber);
    solve->add_option("--quad-points", sa.quad_points, "Gauss points per interval")->check(CLI::PositiveNumber);
    solve->add_option("--integration", sa.integration, "gauss or nodal")
        ->transform(CLI::CheckedTransformer(integration_names));
    solve->add_option("--sweep-adjoint", sa.sweep_adjoint, "exact or frozen")
        ->transform(CLI::CheckedTransformer(adjoint_names));

    ConvergenceArgs ca;
    auto* conv = app.add_subcommand("convergence", "Error table over mesh halvings");
    conv->add_option("--problem", ca.problem, "Built-in problem")->required()->check(problems);
    conv->add_option("--orders", ca.orders, "Comma-separated degrees")->delimiter(',');
    conv->add_option("--levels", ca.levels, "Number of halvings K")->check(CLI::PositiveNumber);
    conv->add_option("--out", ca.out_file, "CSV file (default: stdout)");
    conv->add_flag("--table-preset", ca.table, "Reference-table settings (nodal norm; nodal integration and frozen sweep for nonlinear-quadratic)");
    conv->add_flag("--serial", ca.serial, "Run levels one after another");
    conv->add_option("--h-ref", ca.h_ref, "Reference mesh width")->check(CLI::PositiveNumber);
    conv->add_option("--r-ref", ca.r_ref, "Reference degree")->check(CLI::PositiveNumber);
    conv->add_option("--method", ca.method, "pgd or fbs")->transform(CLI::CheckedTransformer(method_names));
    conv->add_option("--grad-tol", ca.grad_tol, "Stationarity tolerance")->check(CLI::PositiveNumber);
    conv->add_option("--integration", ca.integration, "gauss or nodal")
        ->transform(CLI::CheckedTransformer(integration_names));
    conv->add_option("--sweep-adjoint", ca.sweep_adjoint, "exact or frozen")
        ->transform(CLI::CheckedTransformer(adjoint_names));
    conv->add_option("--norm", ca.norm, "nodal, nodal-skip-last or gauss")->transform(CLI::CheckedTransformer(norm_names));

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Finite-difference and weak-form checks");
    verify->add_option("--problem", va.problem, "Built-in problem")->required()->check(problems);
    verify->add_option("--order", va.options.order, "Polynomial degree r")->check(CLI::Range(0, 12));
    verify->add_option("--intervals", va.options.intervals, "Number of intervals")->check(CLI::PositiveNumber);
    verify->add_option("--seed", va.options.seed, "Random seed");
    verify->add_option("--trials", va.options.trials, "Random trials per check")->check(CLI::PositiveNumber);
    verify->add_option("--corrupt", va.corrupt, "Break one derivative (fx, fu, gx, gu)")
        ->check(CLI::IsMember({"fx", "fu", "gx", "gu"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*solve) {
            return do_solve(sa, out);
        }
        if (*conv) {
            return do_convergence(ca, out, err);
        }
        return do_verify(va, out);
    } catch (const StallError& e) {
        err << "error: " << e.what() << '\n';
        return exit_stall;
    } catch (const SolverFailure& e) {
        err << "error: " << e.what() << '\n';
        return exit_stall;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_check_failed;
    }
}

} // namespace dgocp::cli
