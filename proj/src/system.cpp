#include "weaksim/system.hpp"

#include "weaksim/errors.hpp"

#include <cmath>
#include <string>

namespace weaksim {

namespace {

constexpr double kHermitianTol = 1e-12;

void check_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b)
        throw DimMismatch(std::string(what) + ": dimensions " +
                          std::to_string(a) + " and " + std::to_string(b));
}

} // namespace

SystemState make_state(const Eigen::VectorXcd& amplitudes) {
    if (amplitudes.size() < 2)
        throw DimMismatch("make_state: need dimension >= 2, got " +
                          std::to_string(amplitudes.size()));
    const double n = amplitudes.norm();
    if (n < 1e-14) throw ZeroVector("make_state: zero vector");
    return SystemState{amplitudes / n};
}

Observable make_observable(const Eigen::MatrixXcd& matrix) {
    if (matrix.rows() != matrix.cols())
        throw DimMismatch("make_observable: matrix is " +
                          std::to_string(matrix.rows()) + "x" +
                          std::to_string(matrix.cols()));
    if (matrix.rows() < 2)
        throw DimMismatch("make_observable: need dimension >= 2");
    const double skew =
        (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (skew > kHermitianTol)
        throw NonHermitian("make_observable: anti-Hermitian part " +
                           std::to_string(skew) + " exceeds 1e-12");
    return Observable{matrix};
}

Observable named_observable(std::string_view name) {
    Eigen::MatrixXcd m(2, 2);
    const cplx i(0.0, 1.0);
    if (name == "pauli-x")
        m << 0, 1, 1, 0;
    else if (name == "pauli-y")
        m << 0, -i, i, 0;
    else if (name == "pauli-z")
        m << 1, 0, 0, -1;
    else if (name == "identity")
        m << 1, 0, 0, 1;
    else
        throw BadScenario("named_observable: unknown name '" +
                          std::string(name) + "'");
    return Observable{m};
}

cplx inner_product(const SystemState& psi_f, const SystemState& psi_i) {
    check_same_dim(psi_f.dim(), psi_i.dim(), "inner_product");
    return psi_f.amplitudes.dot(psi_i.amplitudes); // Eigen dot conjugates lhs
}

double expectation(const Observable& obs, const SystemState& psi) {
    check_same_dim(obs.dim(), psi.dim(), "expectation");
    const cplx v = psi.amplitudes.dot(obs.matrix * psi.amplitudes);
    const double scale = 1.0 + obs.matrix.cwiseAbs().maxCoeff();
    if (std::abs(v.imag()) > kHermitianTol * scale)
        throw NonHermitian("expectation: imaginary residue " +
                           std::to_string(v.imag()));
    return v.real();
}

WeakValue weak_value(const Observable& obs, const SystemState& psi_i,
                     const SystemState& psi_f, double overlap_threshold) {
    check_same_dim(obs.dim(), psi_i.dim(), "weak_value");
    check_same_dim(obs.dim(), psi_f.dim(), "weak_value");
    const cplx overlap = inner_product(psi_f, psi_i);
    if (std::abs(overlap) < overlap_threshold)
        throw OrthogonalPostSelection(
            "weak_value: |<psi_f|psi_i>| = " + std::to_string(std::abs(overlap)) +
            " below threshold " + std::to_string(overlap_threshold));
    const cplx numerator = psi_f.amplitudes.dot(obs.matrix * psi_i.amplitudes);
    const cplx w = numerator / overlap;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
        throw InvariantViolation("weak_value: non-finite result");
    return WeakValue{w.real(), w.imag()};
}

SpectralDecomposition eigendecompose(const Observable& obs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(obs.matrix);
    if (solver.info() != Eigen::Success)
        throw InvariantViolation("eigendecompose: solver failed to converge");

    SpectralDecomposition sd{solver.eigenvalues(), solver.eigenvectors()};
    // Gauge fix: rotate each column so its first non-negligible component is
    // real and positive.
    for (Eigen::Index c = 0; c < sd.eigenvectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < sd.eigenvectors.rows(); ++r) {
            const cplx v = sd.eigenvectors(r, c);
            if (std::abs(v) > 1e-12) {
                sd.eigenvectors.col(c) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
    return sd;
}

} // namespace weaksim
