#include "weaksim/errors.hpp"
#include "weaksim/measurement.hpp"
#include "weaksim/theory.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace weaksim;

namespace {

const Grid kMid = build_grid(512, 60.0);

PointerState chirped() { return make_gaussian(kMid, 0.0, 0.0, 1.0, 0.5); }
PointerState plain() { return make_gaussian(kMid, 0.0, 0.0, 1.0, 0.0); }

// two off-center humps, no symmetry, still a real wavefunction
PointerState lopsided() {
    cvec samples(kMid.n_points);
    for (std::size_t j = 0; j < kMid.n_points; ++j) {
        const double q = kMid.position(j);
        samples[j] = std::exp(-0.25 * (q + 1.0) * (q + 1.0)) +
                     0.6 * std::exp(-(q - 1.5) * (q - 1.5) / (4.0 * 0.64));
    }
    return pointer_from_samples(kMid, samples);
}

} // namespace

TEST_CASE("shift prediction, purely imaginary weak value") {
    const ShiftPrediction p = predict_shifts({0.0, 1.0}, 0.01, chirped(), 1.0);
    CHECK(p.delta_q == doctest::Approx(0.02).epsilon(1e-9));
    CHECK(p.delta_p == doctest::Approx(0.025).epsilon(1e-9));
    CHECK(p.mean_q_f == doctest::Approx(0.02).epsilon(1e-9));
    CHECK(p.mean_p_f == doctest::Approx(0.025).epsilon(1e-9));
}

TEST_CASE("shift prediction, real weak value") {
    const ShiftPrediction p = predict_shifts({1.7, 0.0}, 0.01, chirped(), 1.0);
    CHECK(p.delta_q == doctest::Approx(0.017).epsilon(1e-9));
    CHECK(std::abs(p.delta_p) <= 1e-12);
}

TEST_CASE("shift prediction, real pointer") {
    // rate vanishes, so only the momentum channel responds to Im(A_w)
    const ShiftPrediction p = predict_shifts({0.0, 1.0}, 0.01, plain(), 1.0);
    CHECK(std::abs(p.delta_q) <= 1e-9);
    CHECK(p.delta_p == doctest::Approx(0.005).epsilon(1e-9));
}

TEST_CASE("shift prediction is linear in g") {
    const ShiftPrediction p1 = predict_shifts({0.3, 0.8}, 0.01, chirped(), 1.0);
    const ShiftPrediction p2 = predict_shifts({0.3, 0.8}, 0.02, chirped(), 1.0);
    CHECK(std::abs(p2.delta_q - 2.0 * p1.delta_q) <= 1e-12);
    CHECK(std::abs(p2.delta_p - 2.0 * p1.delta_p) <= 1e-12);
}

TEST_CASE("shift prediction respects the pointer mass") {
    // delta_q = g a + g b m (dVar_q/dt), and the rate itself carries 1/m,
    // so the product is mass-independent for a fixed state
    const ShiftPrediction p1 = predict_shifts({0.0, 1.0}, 0.01, chirped(), 1.0);
    const ShiftPrediction p4 = predict_shifts({0.0, 1.0}, 0.01, chirped(), 4.0);
    CHECK(p1.delta_q == doctest::Approx(p4.delta_q).epsilon(1e-12));
}

TEST_CASE("pointer observables reproduce the moment integrals") {
    const PointerState phi = make_gaussian(kMid, 0.4, -0.3, 1.1, 0.35);
    const Moments m = moments(phi);
    CHECK(std::abs(PointerObservable::position().expectation(phi) - m.mean_q) <=
          1e-10);
    CHECK(std::abs(PointerObservable::momentum().expectation(phi) - m.mean_p) <=
          1e-10);
    CHECK(std::abs(PointerObservable::position_squared().expectation(phi) -
                   (m.var_q + m.mean_q * m.mean_q)) <= 1e-10);
    CHECK(PointerObservable::position_squared().label() == "q^2");
}

TEST_CASE("non-Hermitian factor products are rejected") {
    using Factor = PointerObservable::Factor;
    CHECK_THROWS_AS(
        PointerObservable::composite({Factor{true, 1}, Factor{false, 1}}),
        NonHermitianObservable);
}

TEST_CASE("symmetric factor products are accepted") {
    using Factor = PointerObservable::Factor;
    const PointerObservable pqp = PointerObservable::composite(
        {Factor{false, 1}, Factor{true, 1}, Factor{false, 1}});
    CHECK(pqp.label() == "pqp");
    // <p q p> of a centered real gaussian: integrand phi' q phi' is odd
    CHECK(std::abs(pqp.expectation(plain())) <= 1e-10);
}

TEST_CASE("factor power bounds") {
    using Factor = PointerObservable::Factor;
    CHECK_THROWS_AS(PointerObservable::composite({Factor{true, 5}}),
                    BadScenario);
    CHECK_THROWS_AS(PointerObservable::composite({}), BadScenario);
}

TEST_CASE("general response formula reduces to the moment shifts") {
    const PointerState phi = make_gaussian(kMid, 0.3, 0.2, 1.0, 0.4);
    const WeakValue w{0.7, -0.5};
    const double g = 0.02;
    const ShiftPrediction p = predict_shifts(w, g, phi, 1.0);
    CHECK(std::abs(predict_general_observable(w, g, phi,
                                              PointerObservable::position()) -
                   p.mean_q_f) <= 1e-12);
    CHECK(std::abs(predict_general_observable(w, g, phi,
                                              PointerObservable::momentum()) -
                   p.mean_p_f) <= 1e-12);
}

TEST_CASE("q^2 is first-order blind for a real weak value on a centered real pointer") {
    const PointerState phi = plain();
    const double before =
        PointerObservable::position_squared().expectation(phi);
    const double after = predict_general_observable(
        {1.3, 0.0}, 0.05, phi, PointerObservable::position_squared());
    // i<[p, q^2]> = 2<q> = 0 here, and b = 0 kills the anticommutator term
    CHECK(std::abs(after - before) <= 1e-10);
}

TEST_CASE("general response tracks an exact simulation to second order") {
    // three-level system tuned to A_w = 1 exactly, with real branch weights
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3, 3);
    a(0, 0) = 1.0;
    a(2, 2) = -1.0;
    Eigen::VectorXcd vi(3), vf(3);
    vi << std::sqrt(0.7), std::sqrt(0.4), std::sqrt(0.2);
    vf << std::sqrt(0.7), -std::sqrt(0.4), std::sqrt(0.2);

    CouplingSpec spec;
    spec.observable = make_observable(a);
    spec.psi_i = make_state(vi);
    spec.psi_f = make_state(vf);
    const WeakValue w =
        weak_value(spec.observable, spec.psi_i, spec.psi_f);
    CHECK(std::abs(w.a - 1.0) <= 1e-12);
    CHECK(std::abs(w.b) <= 1e-12);

    const PointerState phi = make_gaussian(kMid, 0.5, 0.2, 1.0, 0.3);
    const PointerObservable q2 = PointerObservable::position_squared();
    auto err = [&](double g) {
        spec.g = g;
        const PointerState cond =
            conditioned_pointer(couple_postselect_exact(spec, phi));
        return std::abs(q2.expectation(cond) -
                        predict_general_observable(w, g, phi, q2));
    };
    const double e1 = err(0.01);
    const double e2 = err(0.02);
    CHECK(e1 <= 50.0 * 0.01 * 0.01);
    CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.4)); // O(g^2)
}

TEST_CASE("special cases: real weak value") {
    const CaseReport r =
        special_case_checks({std::sqrt(3.0), 0.0}, chirped(), 1.0);
    CHECK(r.real_weak_value);
    CHECK_FALSE(r.real_pointer);
    REQUIRE(r.delta_q_per_g.has_value());
    REQUIRE(r.delta_p_per_g.has_value());
    CHECK(*r.delta_q_per_g == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(std::abs(*r.delta_p_per_g) <= 1e-12);
}

TEST_CASE("special cases: real pointer") {
    const CaseReport r = special_case_checks({0.0, 1.0}, plain(), 1.0);
    CHECK_FALSE(r.real_weak_value);
    CHECK(r.real_pointer);
    REQUIRE(r.delta_q_per_g.has_value());
    REQUIRE(r.delta_p_per_g.has_value());
    CHECK(std::abs(*r.delta_q_per_g) <= 1e-12);
    CHECK(*r.delta_p_per_g == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("special cases: generic configuration reports nothing reduced") {
    const CaseReport r = special_case_checks({0.0, 1.0}, chirped(), 1.0);
    CHECK_FALSE(r.real_weak_value);
    CHECK_FALSE(r.real_pointer);
    CHECK_FALSE(r.delta_q_per_g.has_value());
    CHECK_FALSE(r.delta_p_per_g.has_value());
    CHECK(r.summary == "general case: full shift theorem applies");
}

TEST_CASE("any real pointer has a frozen variance") {
    const PointerState phi = lopsided();
    CHECK(std::abs(d_var_q_dt(phi, 1.0)) <= 1e-6);
    const CaseReport r = special_case_checks({0.2, 0.9}, phi, 1.0);
    CHECK(r.real_pointer);
}
