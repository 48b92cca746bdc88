#include "weaksim/errors.hpp"
#include "weaksim/rng.hpp"
#include "weaksim/system.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace weaksim;

namespace {

SystemState qubit(cplx c0, cplx c1) {
    Eigen::VectorXcd v(2);
    v << c0, c1;
    return make_state(v);
}

const SystemState kZero = qubit(1.0, 0.0);
const SystemState kOne = qubit(0.0, 1.0);
const SystemState kPlus = qubit(1.0, 1.0);
const SystemState kPlusI = qubit(1.0, cplx(0.0, 1.0));

} // namespace

TEST_CASE("make_state normalizes") {
    CHECK(kZero.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(kPlus.amplitudes(0) - 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(std::abs(kPlus.amplitudes(1) - 1.0 / std::sqrt(2.0)) <= 1e-12);

    Eigen::VectorXcd big(3);
    big << 3.0, 0.0, 4.0;
    const SystemState s = make_state(big);
    CHECK(std::abs(s.amplitudes(0) - 0.6) <= 1e-12);
    CHECK(std::abs(s.amplitudes(2) - 0.8) <= 1e-12);
}

TEST_CASE("make_state rejects degenerate input") {
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(2);
    CHECK_THROWS_AS(make_state(zero), ZeroVector);
    Eigen::VectorXcd one(1);
    one << 1.0;
    CHECK_THROWS_AS(make_state(one), DimMismatch);
}

TEST_CASE("inner_product conjugates the first slot") {
    CHECK(std::abs(inner_product(kZero, kZero) - 1.0) <= 1e-12);
    CHECK(std::abs(inner_product(kZero, kOne)) <= 1e-12);
    const cplx v = inner_product(kPlusI, kPlus);
    CHECK(std::abs(v - cplx(0.5, -0.5)) <= 1e-12);

    Eigen::VectorXcd three = Eigen::VectorXcd::Ones(3);
    CHECK_THROWS_AS(inner_product(kZero, make_state(three)), DimMismatch);
}

TEST_CASE("expectation values") {
    const Observable z = named_observable("pauli-z");
    const Observable x = named_observable("pauli-x");
    CHECK(expectation(z, kZero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(expectation(z, kPlus)) <= 1e-12);
    CHECK(expectation(x, kPlus) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("make_observable rejects non-Hermitian input") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, cplx(0.0, 1.0), cplx(0.0, 1.0), -1.0; // m(1,0) should be -i
    CHECK_THROWS_AS(make_observable(m), NonHermitian);
}

TEST_CASE("weak value of the qubit case is i") {
    const WeakValue w = weak_value(named_observable("pauli-z"), kPlus, kPlusI);
    CHECK(std::abs(w.a) <= 1e-12);
    CHECK(std::abs(w.b - 1.0) <= 1e-12);
}

TEST_CASE("weak value eigenstate collapse") {
    const WeakValue w = weak_value(named_observable("pauli-z"), kZero, kZero);
    CHECK(w.a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(w.b) <= 1e-12);
}

TEST_CASE("weak value can leave the spectral range") {
    const double th = std::numbers::pi / 3.0;
    const WeakValue w = weak_value(named_observable("pauli-x"), kZero,
                                   qubit(std::cos(th), std::sin(th)));
    CHECK(w.a == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(std::abs(w.b) <= 1e-12);
}

TEST_CASE("orthogonal post-selection is refused") {
    CHECK_THROWS_AS(weak_value(named_observable("pauli-z"), kZero, kOne),
                    OrthogonalPostSelection);
    // threshold is a knob
    CHECK_NOTHROW(weak_value(named_observable("pauli-z"), kZero,
                             qubit(1e-4, 1.0), 1e-5));
}

TEST_CASE("eigendecompose pauli matrices") {
    const SpectralDecomposition z = eigendecompose(named_observable("pauli-z"));
    CHECK(z.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(z.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(z.eigenvectors(1, 0) - 1.0) <= 1e-12); // |1> first
    CHECK(std::abs(z.eigenvectors(0, 1) - 1.0) <= 1e-12); // |0> second

    const SpectralDecomposition x = eigendecompose(named_observable("pauli-x"));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(x.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(x.eigenvectors(0, 0) - r) <= 1e-12);
    CHECK(std::abs(x.eigenvectors(1, 0) + r) <= 1e-12);
    CHECK(std::abs(x.eigenvectors(0, 1) - r) <= 1e-12);
    CHECK(std::abs(x.eigenvectors(1, 1) - r) <= 1e-12);
}

TEST_CASE("eigendecompose degenerate identity") {
    const SpectralDecomposition d =
        eigendecompose(make_observable(Eigen::MatrixXcd::Identity(3, 3)));
    for (int i = 0; i < 3; ++i)
        CHECK(d.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::MatrixXcd recon = d.eigenvectors *
                                   d.eigenvalues.cast<cplx>().asDiagonal() *
                                   d.eigenvectors.adjoint();
    CHECK((recon - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() <=
          1e-10);
}

TEST_CASE("eigendecompose properties over random Hermitian matrices") {
    double worst_recon = 0.0, worst_ortho = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
        Rng rng(90, static_cast<std::uint64_t>(trial));
        const int dim = 2 + static_cast<int>(rng.uniform_index(5));
        const Observable a = random_observable(rng, dim);
        const SpectralDecomposition d = eigendecompose(a);

        for (int i = 1; i < dim; ++i) CHECK(d.eigenvalues(i) >= d.eigenvalues(i - 1));

        const Eigen::MatrixXcd recon = d.eigenvectors *
                                       d.eigenvalues.cast<cplx>().asDiagonal() *
                                       d.eigenvectors.adjoint();
        worst_recon =
            std::max(worst_recon, (recon - a.matrix).cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd gram = d.eigenvectors.adjoint() * d.eigenvectors;
        worst_ortho = std::max(
            worst_ortho,
            (gram - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff());

        // gauge: first non-negligible component of each column real positive
        for (int col = 0; col < dim; ++col) {
            for (int row = 0; row < dim; ++row) {
                const cplx v = d.eigenvectors(row, col);
                if (std::abs(v) > 1e-12) {
                    CHECK(std::abs(std::arg(v)) <= 1e-10);
                    break;
                }
            }
        }
    }
    CHECK(worst_recon <= 1e-10);
    CHECK(worst_ortho <= 1e-12);
}

TEST_CASE("weak value algebraic properties") {
    for (int trial = 0; trial < 60; ++trial) {
        Rng rng(91, static_cast<std::uint64_t>(trial));
        const int dim = 2 + static_cast<int>(rng.uniform_index(3));
        const Observable a = random_observable(rng, dim);
        const Observable b = random_observable(rng, dim);
        const SystemState psi_i = random_state(rng, dim);
        SystemState psi_f = random_state(rng, dim);
        while (std::abs(inner_product(psi_f, psi_i)) < 0.2)
            psi_f = random_state(rng, dim);

        // global phase invariance
        const WeakValue w = weak_value(a, psi_i, psi_f);
        SystemState pi = psi_i, pf = psi_f;
        pi.amplitudes *= std::polar(1.0, rng.uniform(0.0, 6.28));
        pf.amplitudes *= std::polar(1.0, rng.uniform(0.0, 6.28));
        const WeakValue wp = weak_value(a, pi, pf);
        CHECK(std::abs(w.a - wp.a) <= 1e-12);
        CHECK(std::abs(w.b - wp.b) <= 1e-12);

        // linearity
        const Observable sum = make_observable(a.matrix + b.matrix);
        const WeakValue wa = weak_value(a, psi_i, psi_f);
        const WeakValue wb = weak_value(b, psi_i, psi_f);
        const WeakValue ws = weak_value(sum, psi_i, psi_f);
        CHECK(std::abs(ws.a - (wa.a + wb.a)) <= 1e-11);
        CHECK(std::abs(ws.b - (wa.b + wb.b)) <= 1e-11);

        // psi_f = psi_i reduces to the expectation value
        const WeakValue we = weak_value(a, psi_i, psi_i);
        CHECK(std::abs(we.a - expectation(a, psi_i)) <= 1e-12);
        CHECK(std::abs(we.b) <= 1e-12);

        // eigenstate collapse
        const SpectralDecomposition dec = eigendecompose(a);
        const SystemState eig = make_state(dec.eigenvectors.col(0));
        SystemState pf2 = random_state(rng, dim);
        while (std::abs(inner_product(pf2, eig)) < 0.2)
            pf2 = random_state(rng, dim);
        const WeakValue wc = weak_value(a, eig, pf2);
        CHECK(std::abs(wc.a - dec.eigenvalues(0)) <= 1e-10);
        CHECK(std::abs(wc.b) <= 1e-10);
    }
}
