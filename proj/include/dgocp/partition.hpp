#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace dgocp {

/// Which one-sided limit to take at an interval node.
enum class Side { left, right };

/// Time mesh 0 = t_0 < t_1 < ... < t_N = T. Immutable; copies share storage.
class Partition {
public:
    /// Throws std::invalid_argument unless the nodes are strictly increasing, start at 0 and N >= 1.
    explicit Partition(std::vector<double> nodes);

    [[nodiscard]] std::size_t intervals() const noexcept { return nodes_->size() - 1; }
    [[nodiscard]] double node(std::size_t n) const { return (*nodes_)[n]; }
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return *nodes_; }
    [[nodiscard]] double horizon() const noexcept { return nodes_->back(); }

    /// Length of interval n (0-based, covering [t_n, t_{n+1}]).
    [[nodiscard]] double width(std::size_t n) const { return (*nodes_)[n + 1] - (*nodes_)[n]; }
    [[nodiscard]] double max_width() const;

    /// Interval containing t; at an interior node `side` picks the neighbour.
    [[nodiscard]] std::size_t locate(double t, Side side) const;

    /// Maps the reference point xi in [-1, 1] on interval n to time.
    [[nodiscard]] double time_at(std::size_t n, double xi) const;

    /// Partition of s = T - t: s_n = T - t_{N-n}.
    [[nodiscard]] Partition reversed() const;

    [[nodiscard]] bool same_nodes(const Partition& other) const;

private:
    std::shared_ptr<const std::vector<double>> nodes_;
};

/// Uniform partition with t_n = n T / N.
Partition make_uniform_partition(double horizon, std::size_t intervals);

/// A sample location inside the solve: the time, the interval it was drawn
/// from and its reference coordinate there. Callees evaluating piecewise data
/// on the same partition use (interval, xi) so node traces are unambiguous.
struct TimePoint {
    double t = 0.0;
    std::size_t interval = 0;
    double xi = 0.0;
};

} // namespace dgocp
