#include "weaksim/grid.hpp"

#include "weaksim/errors.hpp"
#include "weaksim/fft.hpp"

#include <numbers>
#include <string>

namespace weaksim {

double Grid::dk() const {
    return 2.0 * std::numbers::pi / length;
}

double Grid::momentum(std::size_t i) const {
    const auto n = static_cast<long long>(i) <
                           static_cast<long long>(n_points / 2)
                       ? static_cast<long long>(i)
                       : static_cast<long long>(i) - static_cast<long long>(n_points);
    return dk() * static_cast<double>(n);
}

double Grid::k_max() const {
    return std::numbers::pi * static_cast<double>(n_points) / length;
}

std::vector<double> Grid::positions() const {
    std::vector<double> q(n_points);
    for (std::size_t i = 0; i < n_points; ++i) q[i] = position(i);
    return q;
}

std::vector<double> Grid::momenta() const {
    std::vector<double> k(n_points);
    for (std::size_t i = 0; i < n_points; ++i) k[i] = momentum(i);
    return k;
}

Grid build_grid(std::size_t n_points, double length) {
    if (n_points < 64 || !is_power_of_two(n_points))
        throw BadGridSpec("grid: n_points must be a power of two >= 64, got " +
                          std::to_string(n_points));
    if (!(length > 0.0))
        throw BadGridSpec("grid: length must be positive");
    return Grid{n_points, length};
}

} // namespace weaksim
