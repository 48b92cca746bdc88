#pragma once

#include "weaksim/pointer.hpp"
#include "weaksim/system.hpp"

namespace weaksim {

// Impulsive von Neumann coupling exp(-i g A (x) p) followed by projection
// onto psi_f.  hbar = 1 throughout.
struct CouplingSpec {
    double g = 0.0;
    Observable observable;
    SystemState psi_i;
    SystemState psi_f;
    double mass = 1.0;
};

// Post-selected pointer amplitude alpha(q) = <psi_f| exp(-i g A p) |psi_i, phi>.
// Sub-normalized: its squared norm is the post-selection success probability.
struct PostSelectedPointer {
    Grid grid;
    cvec amplitudes;
    double success_prob = 0.0;
};

// One eigenvalue group of A as seen between preparation and post-selection:
// alpha(q) = sum_k post_coeff_k * phi(q - g * eigenvalue_k).
struct Branch {
    double eigenvalue = 0.0;
    cplx post_coeff;   // <psi_f|P_k|psi_i>
    double weight = 0.0; // <psi_i|P_k|psi_i>
};

// Spectral branches of the coupling, degenerate eigenvalues merged.
std::vector<Branch> eigen_branches(const CouplingSpec& spec);

// Exact backend: translates the pointer by g*eigenvalue per branch and sums
// with post-selection coefficients.  Exact at every coupling strength.
PostSelectedPointer couple_postselect_exact(const CouplingSpec& spec,
                                            const PointerState& pointer);

// First-order backend: alpha = <f|i> (1 - i g A_w p) phi.
PostSelectedPointer couple_postselect_first_order(
    const CouplingSpec& spec, const PointerState& pointer,
    double overlap_threshold = kDefaultOverlapThreshold);

// Weak-value exponential backend: alpha = <f|i> exp(-i g A_w p) phi.
// The imaginary part of A_w makes this an unbounded momentum-space
// amplification exp(g*b*k); refused when g*|b|*k_max > 1.
PostSelectedPointer couple_postselect_weak_exp(
    const CouplingSpec& spec, const PointerState& pointer,
    double overlap_threshold = kDefaultOverlapThreshold);

double success_probability(const PostSelectedPointer& alpha);

// Normalizes alpha into a proper pointer state (divides by sqrt of the
// success probability).  Success below 1e-12 is refused.
PointerState conditioned_pointer(const PostSelectedPointer& alpha);

// Pointer moments after the coupling with no post-selection at all:
// the eigenvalue-weighted mixture over branches.
Moments unconditional_moments(const CouplingSpec& spec,
                              const PointerState& pointer);

// Independent cross-check: builds the full dim x N joint array, applies the
// coupling unitary in the joint eigen/momentum representation, and contracts
// with psi_f.  Deliberately shares no eigensolver and no FFT with the exact
// backend (hand-rolled Jacobi + naive DFT).  Guarded to dim*N <= 1e6.
PostSelectedPointer full_tensor_reference(const CouplingSpec& spec,
                                          const PointerState& pointer);

} // namespace weaksim
