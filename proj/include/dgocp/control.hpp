#pragma once

#include "dgocp/dg_function.hpp"

#include <optional>
#include <stdexcept>
#include <variant>

namespace dgocp {

/// Raised when an operation needs a piecewise-polynomial control but gets a closed form.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Pointwise bounds u_lo <= u(t) <= u_hi; entries may be infinite.
struct Box {
    Vector lower;
    Vector upper;

    static Box unbounded(int m);
    [[nodiscard]] Vector project(const Vector& u) const;
    [[nodiscard]] bool contains(const Vector& u, double slack = 0.0) const;
};

/// A control u: [0, T] -> R^m, either a DG function or a closed-form callable.
class ControlFunction {
public:
    ControlFunction(DGFunction u);
    ControlFunction(TimeFunction u, int dim);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] bool is_piecewise() const noexcept { return std::holds_alternative<DGFunction>(repr_); }

    /// Throws UnsupportedOperation for closed-form controls.
    [[nodiscard]] const DGFunction& dg() const;

    [[nodiscard]] Vector eval(const TimePoint& point) const;
    [[nodiscard]] Vector operator()(double t) const;

private:
    std::variant<DGFunction, TimeFunction> repr_;
    int dim_;
};

/// TV of a piecewise-polynomial control; closed forms throw UnsupportedOperation.
double total_variation(const ControlFunction& u);

} // namespace dgocp
