#pragma once

#include "dgocp/partition.hpp"
#include "dgocp/polybasis.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dgocp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Closed-form vector function of time.
using TimeFunction = std::function<Vector(double)>;

/// Vector function of time that may be discontinuous at nodes; `side` selects the one-sided limit.
using SidedFunction = std::function<Vector(double, Side)>;

/// Piecewise polynomial of degree <= r on a partition, values in R^d.
///
/// Coefficients are modal (Legendre in the local coordinate xi in [-1, 1]) and
/// stored interval-major, then by degree, then by component, so the block of
/// interval n is the contiguous (r + 1) d vector the per-interval solvers use.
class DGFunction {
public:
    DGFunction(Partition partition, int degree, int dim);

    [[nodiscard]] const Partition& partition() const noexcept { return partition_; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t intervals() const noexcept { return partition_.intervals(); }
    [[nodiscard]] std::size_t block_size() const noexcept { return (static_cast<std::size_t>(degree_) + 1) * dim_; }

    [[nodiscard]] std::vector<double>& coefficients() noexcept { return coeffs_; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    /// Coefficient vector (length d) of degree k on interval n.
    [[nodiscard]] Eigen::Map<Vector> coeff(std::size_t n, std::size_t k);
    [[nodiscard]] Eigen::Map<const Vector> coeff(std::size_t n, std::size_t k) const;

    /// All coefficients of interval n, layout [k][component].
    [[nodiscard]] Eigen::Map<Vector> block(std::size_t n);
    [[nodiscard]] Eigen::Map<const Vector> block(std::size_t n) const;

    /// Value on interval n at reference coordinate xi.
    [[nodiscard]] Vector eval_local(std::size_t n, double xi) const;

    /// One-sided value at time t. At t = 0 only the right limit exists and at
    /// t = T only the left one; the side is ignored there.
    [[nodiscard]] Vector eval(double t, Side side) const;

    /// Evaluation at a solver sample point. Uses (interval, xi) directly when
    /// the point belongs to this function's partition, otherwise falls back to
    /// time lookup with the side implied by xi.
    [[nodiscard]] Vector eval(const TimePoint& point) const;

    /// phi_n^- for 1 <= n <= N.
    [[nodiscard]] Vector trace_minus(std::size_t n) const;
    /// phi_n^+ for 0 <= n <= N - 1.
    [[nodiscard]] Vector trace_plus(std::size_t n) const;
    /// [phi]_n = phi_n^+ - phi_n^- for 1 <= n <= N - 1.
    [[nodiscard]] Vector jump(std::size_t n) const;

    /// W(s) = phi(T - s) on the reversed partition.
    [[nodiscard]] DGFunction reversed() const;

    DGFunction& operator+=(const DGFunction& other);
    DGFunction& operator*=(double scale);

private:
    [[nodiscard]] bool owns(const TimePoint& point) const;

    Partition partition_;
    int degree_;
    int dim_;
    std::vector<double> coeffs_;
};

DGFunction operator+(DGFunction a, const DGFunction& b);
DGFunction operator-(DGFunction a, const DGFunction& b);
DGFunction operator*(double s, DGFunction a);

/// Constant function on a partition.
DGFunction constant_function(const Partition& partition, int degree, const Vector& value);

/// Interval-wise L^2 projection onto polynomials of degree <= r, by Gauss quadrature with q points (0: r + 3).
DGFunction project_l2(const TimeFunction& fn, const Partition& partition, int degree, std::size_t quad_points = 0);

/// Gauss approximation of ||F - ref||_{L^2(0,T)}: sqrt(sum_n sum_q w_q h_n / 2 |F - ref|^2).
double l2_error(const DGFunction& f, const TimeFunction& ref, const QuadratureRule& quad);

/// Gauss L^2 distance between two DG functions; the quadrature runs on the partition of `f`.
double l2_distance(const DGFunction& f, const DGFunction& g, std::size_t quad_points = 0);

/// Gauss L^2 norm.
double l2_norm(const DGFunction& f, std::size_t quad_points = 0);

struct NodalErrorOptions {
    /// Leave the final interval out of the sum.
    bool skip_last_interval = false;
};

/// Discrete L^2 error over the r + 1 equidistant points of every interval
/// (endpoints included, traces taken from inside the interval):
/// sqrt(sum_n h_n sum_i |F(tau_i) - ref(tau_i)|^2).
double nodal_l2_error(const DGFunction& f, const SidedFunction& ref, NodalErrorOptions options = {});

/// Adapts a DG function to a SidedFunction.
SidedFunction as_sided(const DGFunction& f);
/// Adapts a closed form to a SidedFunction (side ignored).
SidedFunction as_sided(TimeFunction f);

/// sum_n int_{I_n} |u'| + sum of interior jump magnitudes, summed over components.
double total_variation(const DGFunction& u);

/// Max over interval sample points of |f| (infinity norm of the values).
double sup_norm_at(const DGFunction& f, const std::vector<double>& reference_points);

/// Plain-text dump: "N,r,d" header line, the node list, then one row of modal coefficients per interval.
void write_dg_function(std::ostream& out, const DGFunction& f);
DGFunction read_dg_function(std::istream& in);

} // namespace dgocp
