#pragma once

#include "dgocp/ocp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dgocp {

/// Reference for error studies when no closed form exists: a run on a fine
/// uniform mesh of width h with state degree r.
struct SelfRefined {
    double h = 0.1 / 512.0;
    int r = 0; ///< 0 selects the largest degree of the study
};

struct BuiltinProblem {
    std::string name;
    OCProblem problem;
    std::optional<TimeFunction> exact_state;
    std::optional<TimeFunction> exact_control;
    std::optional<TimeFunction> exact_adjoint;
    std::optional<SelfRefined> reference;
};

/// x' = -x + u, x(0) = 1 on [0, 1], g = (x^2 + u^2) / 2; closed-form optimum.
BuiltinProblem linear_lq();

/// x' = x^2 + u, x(0) = 2 on [0, 0.2], g = (x^2 + u^2) / 2; self-refined reference.
BuiltinProblem nonlinear_quadratic();

/// x' = u, x(0) = 1 on [0, 1], g = ((x - 1 - t)^2 + (u - 1)^2) / 2; optimum x = 1 + t, u = 1.
BuiltinProblem polynomial_check();

/// Throws std::invalid_argument for unknown names.
BuiltinProblem builtin_problem(const std::string& name);
std::vector<std::string> builtin_names();

} // namespace dgocp
