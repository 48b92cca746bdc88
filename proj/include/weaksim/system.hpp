#pragma once

#include "weaksim/fft.hpp"

#include <Eigen/Dense>
#include <string_view>

namespace weaksim {

// Normalized state of the measured d-level system, d >= 2.
struct SystemState {
    Eigen::VectorXcd amplitudes;
    Eigen::Index dim() const { return amplitudes.size(); }
};

// Hermitian observable; construction rejects matrices whose anti-Hermitian
// part exceeds 1e-12 in max norm.
struct Observable {
    Eigen::MatrixXcd matrix;
    Eigen::Index dim() const { return matrix.rows(); }
};

// Eigenvalues ascending; eigenvector columns orthonormal, each with a fixed
// gauge (first component above 1e-12 in magnitude is real and positive) so
// decompositions are reproducible across runs.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors; // column k pairs with eigenvalues[k]
};

// Weak value A_w = a + i b.
struct WeakValue {
    double a = 0.0;
    double b = 0.0;
};

inline constexpr double kDefaultOverlapThreshold = 1e-10;

SystemState make_state(const Eigen::VectorXcd& amplitudes);

Observable make_observable(const Eigen::MatrixXcd& matrix);

// pauli-x | pauli-y | pauli-z | identity (qubit-sized).
Observable named_observable(std::string_view name);

// Conjugate-linear in the first slot: <psi_f | psi_i>.
cplx inner_product(const SystemState& psi_f, const SystemState& psi_i);

double expectation(const Observable& obs, const SystemState& psi);

// <psi_f|A|psi_i> / <psi_f|psi_i>.  Post-selections with overlap magnitude
// below the threshold are refused: the quotient is numerically meaningless
// there, not merely inaccurate.
WeakValue weak_value(const Observable& obs, const SystemState& psi_i,
                     const SystemState& psi_f,
                     double overlap_threshold = kDefaultOverlapThreshold);

SpectralDecomposition eigendecompose(const Observable& obs);

} // namespace weaksim
