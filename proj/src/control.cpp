#include "dgocp/control.hpp"

#include <limits>

namespace dgocp {

Box Box::unbounded(int m)
{
    const double inf = std::numeric_limits<double>::infinity();
    return {Vector::Constant(m, -inf), Vector::Constant(m, inf)};
}

Vector Box::project(const Vector& u) const
{
    return u.cwiseMax(lower).cwiseMin(upper);
}

bool Box::contains(const Vector& u, double slack) const
{
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (u(i) < lower(i) - slack || u(i) > upper(i) + slack) {
            return false;
        }
    }
    return true;
}

ControlFunction::ControlFunction(DGFunction u)
    : repr_(std::move(u)), dim_(std::get<DGFunction>(repr_).dim())
{
}

ControlFunction::ControlFunction(TimeFunction u, int dim) : repr_(std::move(u)), dim_(dim) {}

const DGFunction& ControlFunction::dg() const
{
    if (const auto* f = std::get_if<DGFunction>(&repr_)) {
        return *f;
    }
    throw UnsupportedOperation("control is a closed-form callable, not a DG function");
}

Vector ControlFunction::eval(const TimePoint& point) const
{
    if (const auto* f = std::get_if<DGFunction>(&repr_)) {
        return f->eval(point);
    }
    return std::get<TimeFunction>(repr_)(point.t);
}

Vector ControlFunction::operator()(double t) const
{
    if (const auto* f = std::get_if<DGFunction>(&repr_)) {
        return f->eval(t, Side::right);
    }
    return std::get<TimeFunction>(repr_)(t);
}

double total_variation(const ControlFunction& u)
{
    return total_variation(u.dg());
}

} // namespace dgocp
