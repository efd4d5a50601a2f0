#include "dgocp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dgocp {

Partition::Partition(std::vector<double> nodes)
{
    if (nodes.size() < 2) {
        throw std::invalid_argument("Partition: need at least one interval");
    }
    if (nodes.front() != 0.0) {
        throw std::invalid_argument("Partition: first node must be 0");
    }
    for (std::size_t n = 1; n < nodes.size(); ++n) {
        if (!(nodes[n] > nodes[n - 1]) || !std::isfinite(nodes[n])) {
            throw std::invalid_argument("Partition: nodes must be finite and strictly increasing (index " +
                                        std::to_string(n) + ")");
        }
    }
    nodes_ = std::make_shared<const std::vector<double>>(std::move(nodes));
}

double Partition::max_width() const
{
    double h = 0.0;
    for (std::size_t n = 0; n < intervals(); ++n) {
        h = std::max(h, width(n));
    }
    return h;
}

std::size_t Partition::locate(double t, Side side) const
{
    const auto& x = *nodes_;
    if (!(t >= 0.0 && t <= x.back())) {
        throw std::domain_error("Partition: time " + std::to_string(t) + " outside [0, T]");
    }
    if (side == Side::right) {
        // first node strictly greater than t closes the interval
        auto it = std::upper_bound(x.begin(), x.end(), t);
        if (it == x.end()) {
            return intervals() - 1;
        }
        return static_cast<std::size_t>(it - x.begin()) - 1;
    }
    auto it = std::lower_bound(x.begin(), x.end(), t);
    if (it == x.begin()) {
        return 0;
    }
    return static_cast<std::size_t>(it - x.begin()) - 1;
}

double Partition::time_at(std::size_t n, double xi) const
{
    if (xi == -1.0) {
        return node(n);
    }
    if (xi == 1.0) {
        return node(n + 1);
    }
    return node(n) + 0.5 * (xi + 1.0) * width(n);
}

Partition Partition::reversed() const
{
    const auto& x = *nodes_;
    const double T = x.back();
    std::vector<double> s(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        s[n] = T - x[x.size() - 1 - n];
    }
    s.front() = 0.0;
    s.back() = T;
    return Partition(std::move(s));
}

bool Partition::same_nodes(const Partition& other) const
{
    return nodes_ == other.nodes_ || *nodes_ == *other.nodes_;
}

Partition make_uniform_partition(double horizon, std::size_t intervals)
{
    if (!(horizon > 0.0) || intervals == 0) {
        throw std::invalid_argument("make_uniform_partition: need T > 0 and N >= 1");
    }
    std::vector<double> nodes(intervals + 1);
    for (std::size_t n = 0; n <= intervals; ++n) {
        nodes[n] = horizon * static_cast<double>(n) / static_cast<double>(intervals);
    }
    nodes.back() = horizon;
    return Partition(std::move(nodes));
}

} // namespace dgocp
