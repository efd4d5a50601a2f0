#pragma once

#include "dgocp/problems.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dgocp {

struct CheckResult {
    std::string name;
    double discrepancy = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyOptions {
    int order = 1;
    std::size_t intervals = 8;
    std::uint64_t seed = 42;
    int trials = 5;
};

/// Random DG control of the given degree with coefficients drawn from [-scale, scale].
DGFunction random_control(const Partition& partition, int degree, int dim, std::mt19937_64& rng, double scale = 0.5);

/// Worst relative mismatch between the central difference (j(u+ev) - j(u-ev)) / 2e and (grad j_h(u), v).
double gradient_check(const OCProblem& p, const Partition& part, const Discretization& disc, std::mt19937_64& rng,
                      int trials, double eps = 1e-5);

/// Worst L^2-relative mismatch between (G_h(u+ev) - G_h(u-ev)) / 2e and y_h.
double tangent_check(const OCProblem& p, const Partition& part, const Discretization& disc, std::mt19937_64& rng,
                     int trials, double eps = 1e-5);

/// Worst relative mismatch between (j(u+ev) - 2j(u) + j(u-ev)) / e^2 and j_h''(u)(v, v).
double hessian_check(const OCProblem& p, const Partition& part, const Discretization& disc, std::mt19937_64& rng,
                     int trials, double eps = 1e-4);

/// Worst max-norm weak residual of the discrete adjoint at random controls.
double adjoint_residual_check(const OCProblem& p, const Partition& part, const Discretization& disc,
                              std::mt19937_64& rng, int trials);

/// Solves the backward DG equation of an affine right-hand side as one global
/// linear system, built column by column from backward_weak_residual.
DGFunction solve_backward_global(const IVPRight& rhs, const Vector& terminal, const Partition& partition,
                                 const Discretization& disc, int dim);

/// Largest coefficient gap between the backward solve of the adjoint equation, the
/// reversed forward solve of its time-reversed system and the global weak-form solve.
double time_reversal_check(const OCProblem& p, const Partition& part, const Discretization& disc,
                           std::mt19937_64& rng, int trials);

/// Replaces one first partial ("fx", "fu", "gx" or "gu") by a wrong one.
OCProblem corrupt_derivative(OCProblem p, const std::string& which);

/// All five checks with their pass thresholds.
std::vector<CheckResult> run_checks(const OCProblem& p, const VerifyOptions& options);

} // namespace dgocp
