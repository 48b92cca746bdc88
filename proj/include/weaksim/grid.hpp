#pragma once

#include <cstddef>
#include <vector>

namespace weaksim {

// Uniform periodic position grid q_j = -L/2 + j*dq, j = 0..N-1, dq = L/N.
// The conjugate momentum lattice is k_n = 2*pi*n/L with n in [-N/2, N/2),
// stored in FFT bin order (bin i holds n = i for i < N/2, else n = i - N).
struct Grid {
    std::size_t n_points = 0;
    double length = 0.0;

    double spacing() const { return length / static_cast<double>(n_points); }
    double dk() const;
    double position(std::size_t i) const {
        return -0.5 * length + static_cast<double>(i) * spacing();
    }
    // Momentum carried by FFT bin i (wraparound ordering).
    double momentum(std::size_t i) const;
    // Largest |k| representable: pi*N/L.
    double k_max() const;

    std::vector<double> positions() const;
    std::vector<double> momenta() const;

    bool operator==(const Grid&) const = default;
};

// Validates N is a power of two >= 64 and L > 0.
Grid build_grid(std::size_t n_points, double length);

} // namespace weaksim
