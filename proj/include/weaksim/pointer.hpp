#pragma once

#include "weaksim/fft.hpp"
#include "weaksim/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace weaksim {

// Pointer wavefunction phi(q_j) sampled on a periodic grid, normalized so
// dq * sum |phi_j|^2 = 1.  States whose probability mass reaches the outer
// 5% of grid points are rejected: the periodic wrap would silently corrupt
// every moment computed afterwards.
struct PointerState {
    Grid grid;
    cvec amplitudes;
};

struct Moments {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double var_q = 0.0;
    double var_p = 0.0;
};

// Polar (Madelung) decomposition phi = R * exp(i*S).  s_prime is the local
// phase gradient S'(q); it is set to zero and flagged invalid where the
// density sits below node_threshold (1e-14 * max rho), since dividing by a
// vanishing density there is pure noise.  current = rho * S' / mass is
// computed directly from Im(conj(phi) * phi') / mass and stays finite at
// nodes.
struct PolarFields {
    std::vector<double> rho;
    std::vector<double> s_prime;
    std::vector<double> current;
    std::vector<std::uint8_t> valid;
};

// Pointer Hamiltonian p^2/(2m) + V(q) for split-operator evolution.
// An empty potential means V = 0.
struct EvolutionSpec {
    double mass = 1.0;
    std::vector<double> potential;
    double dt = 1e-4;
};

// --- construction ----------------------------------------------------------

// Normalized Gaussian exp(-(q-q0)^2/(4 sigma^2) + i chirp (q-q0)^2 + i p0 q).
// Requires 8*sigma of clearance between q0 and the nearest grid edge;
// violations throw TailMass before any aliased state can leak out.
PointerState make_gaussian(const Grid& grid, double q0, double p0, double sigma,
                           double chirp);

// Wraps raw samples in a PointerState: renormalizes, then enforces the tail
// guard.  Throws ZeroVector / DimMismatch / TailMass.
PointerState pointer_from_samples(const Grid& grid, cvec samples);

// Re-checks the norm and tail invariants of an existing state.
void validate_pointer(const PointerState& state);

// --- diagnostics -----------------------------------------------------------

double norm_squared(const PointerState& state);

// dq * sum conj(a) * b over the common grid.
cplx pointer_inner(const PointerState& a, const PointerState& b);

// Probability mass in the outer 5% of grid points (2.5% per edge).
double tail_mass(const PointerState& state);

// Position moments by quadrature, momentum moments on the FFT lattice.
Moments moments(const PointerState& state);

PolarFields polar_fields(const PointerState& state, double mass);

// d Var_q / dt = (<pq + qp> - 2 <q><p>) / m, evaluated algebraically on the
// instantaneous state.  No dependence on the potential: [q^2, V(q)] = 0.
double d_var_q_dt(const PointerState& state, double mass);

// --- transforms ------------------------------------------------------------

// Exact rigid translation phi(q) -> phi(q - s) via momentum-space phases.
PointerState translate(const PointerState& state, double s);

// Strang split-operator evolution over `steps` steps of spec.dt.
// Exactly time-exact for V = 0.  Throws StabilityGuard if dt * max|V| > 0.1.
PointerState evolve_free(const PointerState& state, const EvolutionSpec& spec,
                         std::size_t steps);

// Max-norm residual of d rho/dt + d j/dq, with d rho/dt from a central
// difference (one split step forward and back) and j spectral.
double continuity_residual(const PointerState& state, const EvolutionSpec& spec);

// --- spectral helpers (shared with measurement/theory) ----------------------

// Forward FFT of the amplitudes (unscaled bins).
cvec to_momentum(const PointerState& state);

// Applies the momentum operator p = -i d/dq spectrally.
cvec apply_momentum(const Grid& grid, const cvec& amplitudes);

// Spectral derivative d/dq.
cvec spectral_derivative(const Grid& grid, const cvec& amplitudes);

// --- persistence -----------------------------------------------------------

// Text dump, one row per grid point: q  Re(phi)  Im(phi), 17 significant
// digits, so a round-trip through the file is bit-exact.
void save_pointer(const PointerState& state, std::ostream& out);
void save_pointer(const PointerState& state, const std::string& path);

// Reads amplitudes for `grid` from rows of (q, re, im) or (re, im).
PointerState load_pointer(const Grid& grid, std::istream& in);
PointerState load_pointer(const Grid& grid, const std::string& path);

} // namespace weaksim
