#include "dgocp/dg_function.hpp"

#include "dgocp/integration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dgocp {

namespace {

void require_compatible(const DGFunction& a, const DGFunction& b)
{
    if (a.degree() != b.degree() || a.dim() != b.dim() || !a.partition().same_nodes(b.partition())) {
        throw std::invalid_argument("DGFunction: incompatible operands");
    }
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DGFunction::DGFunction(Partition partition, int degree, int dim)
    : partition_(std::move(partition)), degree_(degree), dim_(dim)
{
    if (degree < 0 || dim < 1) {
        throw std::invalid_argument("DGFunction: need degree >= 0 and dim >= 1");
    }
    coeffs_.assign(partition_.intervals() * block_size(), 0.0);
}

Eigen::Map<Vector> DGFunction::coeff(std::size_t n, std::size_t k)
{
    return {coeffs_.data() + n * block_size() + k * dim_, dim_};
}

Eigen::Map<const Vector> DGFunction::coeff(std::size_t n, std::size_t k) const
{
    return {coeffs_.data() + n * block_size() + k * dim_, dim_};
}

Eigen::Map<Vector> DGFunction::block(std::size_t n)
{
    return {coeffs_.data() + n * block_size(), static_cast<Eigen::Index>(block_size())};
}

Eigen::Map<const Vector> DGFunction::block(std::size_t n) const
{
    return {coeffs_.data() + n * block_size(), static_cast<Eigen::Index>(block_size())};
}

Vector DGFunction::eval_local(std::size_t n, double xi) const
{
    Vector v = Vector::Zero(dim_);
    // P_k recurrence inline; eval_local sits on every hot path.
    double prev = 1.0;
    double cur = xi;
    v += coeff(n, 0);
    if (degree_ >= 1) {
        v += cur * coeff(n, 1);
    }
    for (int k = 1; k < degree_; ++k) {
        const double next = ((2.0 * k + 1.0) * xi * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        v += cur * coeff(n, static_cast<std::size_t>(k) + 1);
    }
    return v;
}

Vector DGFunction::eval(double t, Side side) const
{
    const std::size_t n = partition_.locate(t, side);
    const double h = partition_.width(n);
    double xi = 2.0 * (t - partition_.node(n)) / h - 1.0;
    xi = std::clamp(xi, -1.0, 1.0);
    return eval_local(n, xi);
}

bool DGFunction::owns(const TimePoint& point) const
{
    if (point.interval >= intervals()) {
        return false;
    }
    const double expected = partition_.time_at(point.interval, point.xi);
    return std::abs(expected - point.t) <= 1e-12 * std::max(1.0, partition_.horizon());
}

Vector DGFunction::eval(const TimePoint& point) const
{
    if (owns(point)) {
        return eval_local(point.interval, point.xi);
    }
    return eval(point.t, point.xi < 0.0 ? Side::right : Side::left);
}

Vector DGFunction::trace_minus(std::size_t n) const
{
    if (n < 1 || n > intervals()) {
        throw std::out_of_range("DGFunction::trace_minus: node index");
    }
    return eval_local(n - 1, 1.0);
}

Vector DGFunction::trace_plus(std::size_t n) const
{
    if (n >= intervals()) {
        throw std::out_of_range("DGFunction::trace_plus: node index");
    }
    return eval_local(n, -1.0);
}

Vector DGFunction::jump(std::size_t n) const
{
    if (n < 1 || n + 1 > intervals()) {
        throw std::out_of_range("DGFunction::jump: interior node index");
    }
    return trace_plus(n) - trace_minus(n);
}

DGFunction DGFunction::reversed() const
{
    DGFunction out(partition_.reversed(), degree_, dim_);
    const std::size_t N = intervals();
    for (std::size_t n = 0; n < N; ++n) {
        for (int k = 0; k <= degree_; ++k) {
            // P_k(-xi) = (-1)^k P_k(xi)
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            out.coeff(N - 1 - n, k) = sign * coeff(n, k);
        }
    }
    return out;
}

DGFunction& DGFunction::operator+=(const DGFunction& other)
{
    require_compatible(*this, other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += other.coeffs_[i];
    }
    return *this;
}

DGFunction& DGFunction::operator*=(double scale)
{
    for (double& c : coeffs_) {
        c *= scale;
    }
    return *this;
}

DGFunction operator+(DGFunction a, const DGFunction& b)
{
    a += b;
    return a;
}

DGFunction operator-(DGFunction a, const DGFunction& b)
{
    require_compatible(a, b);
    for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
        a.coefficients()[i] -= b.coefficients()[i];
    }
    return a;
}

DGFunction operator*(double s, DGFunction a)
{
    a *= s;
    return a;
}

DGFunction constant_function(const Partition& partition, int degree, const Vector& value)
{
    DGFunction f(partition, degree, static_cast<int>(value.size()));
    for (std::size_t n = 0; n < f.intervals(); ++n) {
        f.coeff(n, 0) = value;
    }
    return f;
}

DGFunction project_l2(const TimeFunction& fn, const Partition& partition, int degree, std::size_t quad_points)
{
    const auto rule = gauss_rule(quad_points == 0 ? default_quadrature_points(degree) : quad_points);
    const ReferenceBasis basis(degree, rule);
    const Vector probe = fn(partition.time_at(0, rule.points[0]));
    DGFunction out(partition, degree, static_cast<int>(probe.size()));
    for (std::size_t n = 0; n < partition.intervals(); ++n) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vector value = fn(partition.time_at(n, rule.points[q]));
            for (std::size_t k = 0; k < basis.size(); ++k) {
                out.coeff(n, k) += (rule.weights[q] * basis.value(q, k) / ReferenceBasis::norm_squared(k)) * value;
            }
        }
    }
    return out;
}

double l2_error(const DGFunction& f, const TimeFunction& ref, const QuadratureRule& quad)
{
    const Partition& part = f.partition();
    double sum = 0.0;
    for (std::size_t n = 0; n < part.intervals(); ++n) {
        const double half = 0.5 * part.width(n);
        for (std::size_t q = 0; q < quad.size(); ++q) {
            const Vector diff = f.eval_local(n, quad.points[q]) - ref(part.time_at(n, quad.points[q]));
            sum += quad.weights[q] * half * diff.squaredNorm();
        }
    }
    return std::sqrt(sum);
}

double l2_distance(const DGFunction& f, const DGFunction& g, std::size_t quad_points)
{
    const std::size_t q = quad_points == 0 ? default_quadrature_points(std::max(f.degree(), g.degree())) : quad_points;
    const Partition& part = f.partition();
    const auto rule = gauss_rule(q);
    double sum = 0.0;
    for (std::size_t n = 0; n < part.intervals(); ++n) {
        const double half = 0.5 * part.width(n);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            const TimePoint point{part.time_at(n, rule.points[p]), n, rule.points[p]};
            sum += rule.weights[p] * half * (f.eval_local(n, rule.points[p]) - g.eval(point)).squaredNorm();
        }
    }
    return std::sqrt(sum);
}

double l2_norm(const DGFunction& f, std::size_t quad_points)
{
    const auto rule = gauss_rule(quad_points == 0 ? default_quadrature_points(f.degree()) : quad_points);
    const Partition& part = f.partition();
    double sum = 0.0;
    for (std::size_t n = 0; n < part.intervals(); ++n) {
        for (std::size_t q = 0; q < rule.size(); ++q) {
            sum += rule.weights[q] * 0.5 * part.width(n) * f.eval_local(n, rule.points[q]).squaredNorm();
        }
    }
    return std::sqrt(sum);
}

double nodal_l2_error(const DGFunction& f, const SidedFunction& ref, NodalErrorOptions options)
{
    const Partition& part = f.partition();
    const auto tau = equidistant_points(f.degree());
    std::size_t last = part.intervals();
    if (options.skip_last_interval && last > 1) {
        --last;
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < last; ++n) {
        double local = 0.0;
        for (double xi : tau) {
            const Side side = xi < 0.0 ? Side::right : Side::left;
            local += (f.eval_local(n, xi) - ref(part.time_at(n, xi), side)).squaredNorm();
        }
        sum += part.width(n) * local;
    }
    return std::sqrt(sum);
}

SidedFunction as_sided(const DGFunction& f)
{
    return [f](double t, Side side) { return f.eval(t, side); };
}

SidedFunction as_sided(TimeFunction f)
{
    return [f = std::move(f)](double t, Side) { return f(t); };
}

double total_variation(const DGFunction& u)
{
    const std::size_t N = u.intervals();
    double tv = 0.0;
    for (std::size_t n = 1; n < N; ++n) {
        tv += u.jump(n).cwiseAbs().sum();
    }
    if (u.degree() == 0) {
        return tv;
    }
    // Within an interval, split at sign changes of each component's derivative;
    // on monotone pieces int |u_i'| = |u_i(b) - u_i(a)|.
    constexpr int samples = 64;
    for (std::size_t n = 0; n < N; ++n) {
        for (int i = 0; i < u.dim(); ++i) {
            auto value = [&](double xi) { return u.eval_local(n, xi)(i); };
            auto slope = [&](double xi) {
                double s = 0.0;
                for (int k = 1; k <= u.degree(); ++k) {
                    s += u.coeff(n, k)(i) * legendre_deriv(k, xi);
                }
                return s;
            };
            std::vector<double> breaks{-1.0};
            double a = -1.0;
            double sa = slope(a);
            for (int s = 1; s <= samples; ++s) {
                const double b = -1.0 + 2.0 * s / samples;
                const double sb = slope(b);
                if (sa * sb < 0.0) {
                    double lo = a;
                    double hi = b;
                    for (int it = 0; it < 60; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (slope(lo) * slope(mid) <= 0.0) {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    breaks.push_back(0.5 * (lo + hi));
                }
                a = b;
                sa = sb;
            }
            breaks.push_back(1.0);
            for (std::size_t b = 1; b < breaks.size(); ++b) {
                tv += std::abs(value(breaks[b]) - value(breaks[b - 1]));
            }
        }
    }
    return tv;
}

double sup_norm_at(const DGFunction& f, const std::vector<double>& reference_points)
{
    double m = 0.0;
    for (std::size_t n = 0; n < f.intervals(); ++n) {
        for (double xi : reference_points) {
            m = std::max(m, f.eval_local(n, xi).lpNorm<Eigen::Infinity>());
        }
    }
    return m;
}

void write_dg_function(std::ostream& out, const DGFunction& f)
{
    out << "N,r,d\n" << f.intervals() << ',' << f.degree() << ',' << f.dim() << '\n';
    out << "nodes";
    for (double t : f.partition().nodes()) {
        out << ',' << format_double(t);
    }
    out << '\n';
    for (std::size_t n = 0; n < f.intervals(); ++n) {
        out << n;
        const auto blk = f.block(n);
        for (Eigen::Index i = 0; i < blk.size(); ++i) {
            out << ',' << format_double(blk(i));
        }
        out << '\n';
    }
}

DGFunction read_dg_function(std::istream& in)
{
    auto fields = [](const std::string& line) {
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) {
            parts.push_back(item);
        }
        return parts;
    };
    std::string line;
    if (!std::getline(in, line) || line != "N,r,d") {
        throw std::runtime_error("read_dg_function: missing 'N,r,d' header");
    }
    std::getline(in, line);
    const auto head = fields(line);
    if (head.size() != 3) {
        throw std::runtime_error("read_dg_function: malformed size line");
    }
    const std::size_t N = std::stoul(head[0]);
    const int r = std::stoi(head[1]);
    const int d = std::stoi(head[2]);
    std::getline(in, line);
    const auto node_fields = fields(line);
    if (node_fields.size() != N + 2 || node_fields[0] != "nodes") {
        throw std::runtime_error("read_dg_function: malformed node line");
    }
    std::vector<double> nodes;
    for (std::size_t i = 1; i < node_fields.size(); ++i) {
        nodes.push_back(std::stod(node_fields[i]));
    }
    DGFunction f(Partition(std::move(nodes)), r, d);
    for (std::size_t n = 0; n < N; ++n) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("read_dg_function: truncated coefficient rows");
        }
        const auto row = fields(line);
        if (row.size() != f.block_size() + 1 || std::stoul(row[0]) != n) {
            throw std::runtime_error("read_dg_function: malformed coefficient row " + std::to_string(n));
        }
        auto blk = f.block(n);
        for (std::size_t i = 0; i < f.block_size(); ++i) {
            blk(static_cast<Eigen::Index>(i)) = std::stod(row[i + 1]);
        }
    }
    return f;
}

} // namespace dgocp
