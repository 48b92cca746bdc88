#pragma once

#include "weaksim/system.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace weaksim {

// Deterministic generator for the verification batteries.  std::mt19937 with
// std::normal_distribution is not bit-stable across standard libraries, so
// the whole chain is spelled out: splitmix64 -> 53-bit uniforms -> Box-Muller.
// Same (seed, stream) always yields the same draws on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : x_(seed) {
        advance();
        x_ ^= (stream + 1) * 0xD1B54A32D192ED03ULL;
        advance();
    }

    std::uint64_t next_u64() { return advance(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller (u1 forced into (0,1]).
    double normal() {
        const double u1 =
            static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    cplx complex_normal() { return cplx(normal(), normal()); }

  private:
    std::uint64_t advance() {
        x_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t x_;
};

// Haar-random pure state: normalized vector of iid complex Gaussians.
inline SystemState random_state(Rng& rng, Eigen::Index dim) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
    return make_state(v);
}

// Random Hermitian observable (G + G^dagger)/2 with Gaussian entries.
inline Observable random_observable(Rng& rng, Eigen::Index dim) {
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = rng.complex_normal();
    return make_observable(0.5 * (g + g.adjoint()));
}

} // namespace weaksim
