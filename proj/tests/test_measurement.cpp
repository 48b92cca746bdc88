#include "weaksim/errors.hpp"
#include "weaksim/measurement.hpp"
#include "weaksim/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace weaksim;

namespace {

const Grid kSmall = build_grid(256, 40.0);
const Grid kBig = build_grid(1024, 80.0);

SystemState qubit(cplx c0, cplx c1) {
    Eigen::VectorXcd v(2);
    v << c0, c1;
    return make_state(v);
}

// A_w = i on this pair
CouplingSpec canonical(double g) {
    CouplingSpec spec;
    spec.g = g;
    spec.observable = named_observable("pauli-z");
    spec.psi_i = qubit(1.0, 1.0);
    spec.psi_f = qubit(1.0, cplx(0.0, 1.0));
    return spec;
}

// generic complex weak value, no parity cancellations anywhere
CouplingSpec skewed(double g) {
    CouplingSpec spec;
    spec.g = g;
    spec.observable = named_observable("pauli-z");
    spec.psi_i = qubit(1.0, 1.0);
    spec.psi_f = qubit(std::cos(0.6), std::polar(std::sin(0.6), 0.7));
    return spec;
}

double max_abs_diff(const cvec& a, const cvec& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        worst = std::max(worst, std::abs(a[j] - b[j]));
    return worst;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("eigen branches of the canonical pair") {
    const std::vector<Branch> b = eigen_branches(canonical(0.1));
    REQUIRE(b.size() == 2);
    CHECK(b[0].eigenvalue == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(b[1].eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(b[0].post_coeff - cplx(0.0, -0.5)) <= 1e-12);
    CHECK(std::abs(b[1].post_coeff - cplx(0.5, 0.0)) <= 1e-12);
    CHECK(b[0].weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b[1].weight == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("degenerate eigenvalues merge into one branch") {
    CouplingSpec spec;
    spec.g = 0.2;
    spec.observable = make_observable(Eigen::MatrixXcd::Identity(2, 2));
    spec.psi_i = qubit(1.0, 1.0);
    spec.psi_f = qubit(1.0, cplx(0.0, 1.0));
    const std::vector<Branch> b = eigen_branches(spec);
    REQUIRE(b.size() == 1);
    CHECK(b[0].eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(b[0].post_coeff - inner_product(spec.psi_f, spec.psi_i)) <=
          1e-12);
    CHECK(b[0].weight == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact backend on an eigenstate is a rigid shift") {
    CouplingSpec spec;
    spec.g = 0.4;
    spec.observable = named_observable("pauli-z");
    spec.psi_i = qubit(1.0, 0.0);
    spec.psi_f = spec.psi_i;
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.2, 1.0, 0.0);
    const PostSelectedPointer alpha = couple_postselect_exact(spec, phi);
    CHECK(alpha.success_prob == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_diff(alpha.amplitudes, translate(phi, 0.4).amplitudes) <=
          1e-12);
}

TEST_CASE("exact backend is the two-branch superposition") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.0);
    const PostSelectedPointer alpha =
        couple_postselect_exact(canonical(0.3), phi);
    const PointerState plus = translate(phi, 0.3);
    const PointerState minus = translate(phi, -0.3);
    cvec expect(kSmall.n_points);
    for (std::size_t j = 0; j < kSmall.n_points; ++j)
        expect[j] = 0.5 * plus.amplitudes[j] -
                    cplx(0.0, 0.5) * minus.amplitudes[j];
    CHECK(max_abs_diff(alpha.amplitudes, expect) <= 1e-12);
}

TEST_CASE("all backends reduce to the projected pointer at g = 0") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.3, 1.0, 0.2);
    const CouplingSpec spec = canonical(0.0);
    const cplx ovl = inner_product(spec.psi_f, spec.psi_i);
    cvec expect(kSmall.n_points);
    for (std::size_t j = 0; j < kSmall.n_points; ++j)
        expect[j] = ovl * phi.amplitudes[j];

    for (const auto& alpha : {couple_postselect_exact(spec, phi),
                              couple_postselect_first_order(spec, phi),
                              couple_postselect_weak_exp(spec, phi),
                              full_tensor_reference(spec, phi)}) {
        CHECK(max_abs_diff(alpha.amplitudes, expect) <= 1e-12);
        CHECK(alpha.success_prob == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("first-order backend applies the momentum operator literally") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.3);
    CouplingSpec spec;
    spec.g = 0.05;
    spec.observable = named_observable("pauli-z");
    spec.psi_i = qubit(std::cos(0.3), std::sin(0.3));
    spec.psi_f = spec.psi_i;
    const double a_w = std::cos(0.6); // <Z> for this state

    const PostSelectedPointer alpha = couple_postselect_first_order(spec, phi);
    const cvec p_phi = apply_momentum(kSmall, phi.amplitudes);
    cvec expect(kSmall.n_points);
    for (std::size_t j = 0; j < kSmall.n_points; ++j)
        expect[j] = phi.amplitudes[j] -
                    cplx(0.0, spec.g * a_w) * p_phi[j];
    CHECK(max_abs_diff(alpha.amplitudes, expect) <= 1e-12);
}

TEST_CASE("first-order backend deviates from exact at second order") {
    const PointerState phi = make_gaussian(kBig, 0.0, 0.3, 1.0, 0.5);
    const double g = 1e-3;
    const PostSelectedPointer exact = couple_postselect_exact(skewed(g), phi);
    const PostSelectedPointer fo =
        couple_postselect_first_order(skewed(g), phi);
    CHECK(max_abs_diff(exact.amplitudes, fo.amplitudes) <= 10.0 * g * g);
}

TEST_CASE("weak-exp backend with a real weak value is a pure shift") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.4);
    CouplingSpec spec;
    spec.g = 0.2;
    spec.observable = named_observable("pauli-z");
    spec.psi_i = qubit(std::cos(0.3), std::sin(0.3));
    spec.psi_f = spec.psi_i;
    const PostSelectedPointer alpha = couple_postselect_weak_exp(spec, phi);
    const PointerState shifted = translate(phi, spec.g * std::cos(0.6));
    CHECK(max_abs_diff(alpha.amplitudes, shifted.amplitudes) <= 1e-12);
}

TEST_CASE("weak-exp backend tracks exact moments at small coupling") {
    const PointerState phi = make_gaussian(kBig, 0.0, 0.0, 1.0, 0.5);
    const double g = 1e-3;
    const Moments exact = moments(
        conditioned_pointer(couple_postselect_exact(canonical(g), phi)));
    const Moments we = moments(
        conditioned_pointer(couple_postselect_weak_exp(canonical(g), phi)));
    CHECK(std::abs(exact.mean_q - we.mean_q) <= 10.0 * g * g);
    CHECK(std::abs(exact.mean_p - we.mean_p) <= 10.0 * g * g);
}

TEST_CASE("weak-exp backend refuses runaway amplification") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.0);
    // b = 1, k_max ~ 20.1: g = 0.06 pushes g*b*k_max past 1
    CHECK_THROWS_AS(couple_postselect_weak_exp(canonical(0.06), phi),
                    AmplificationGuard);
    CHECK_NOTHROW(couple_postselect_weak_exp(canonical(0.01), phi));
}

TEST_CASE("success probability shifts with the mean momentum") {
    const double g = 1e-2;
    const PointerState still = make_gaussian(kBig, 0.0, 0.0, 1.0, 0.0);
    const PostSelectedPointer a0 = couple_postselect_exact(canonical(g), still);
    CHECK(std::abs(success_probability(a0) - 0.5) <= 10.0 * g * g);

    const PointerState moving = make_gaussian(kBig, 0.0, 0.7, 1.0, 0.0);
    const PostSelectedPointer a1 =
        couple_postselect_exact(canonical(g), moving);
    // succ = |<f|i>|^2 (1 + 2 g b <p>) + O(g^2), b = 1 here
    CHECK(std::abs(success_probability(a1) - 0.5 * (1.0 + 1.4 * g)) <=
          10.0 * g * g);
}

TEST_CASE("conditioned pointer is normalized") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.0);
    const PostSelectedPointer alpha =
        couple_postselect_exact(canonical(0.2), phi);
    const PointerState cond = conditioned_pointer(alpha);
    CHECK(std::abs(norm_squared(cond) - 1.0) <= 1e-12);
}

TEST_CASE("unconditional moments, eigenstate") {
    CouplingSpec spec;
    spec.g = 0.4;
    spec.observable = named_observable("pauli-z");
    spec.psi_i = qubit(1.0, 0.0);
    spec.psi_f = spec.psi_i; // ignored by the unconditional reduction
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.0);
    const Moments m = unconditional_moments(spec, phi);
    CHECK(m.mean_q == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(m.var_q == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unconditional moments, balanced superposition") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.0, 1.0, 0.0);
    const Moments m = unconditional_moments(canonical(0.5), phi);
    // mixture of shifts +-g with equal weight: mean fixed, variance + g^2
    CHECK(std::abs(m.mean_q) <= 1e-9);
    CHECK(m.var_q == doctest::Approx(1.25).epsilon(1e-9));

    CouplingSpec x_spec;
    x_spec.g = 0.3;
    x_spec.observable = named_observable("pauli-x");
    x_spec.psi_i = qubit(1.0, 0.0);
    x_spec.psi_f = qubit(1.0, 1.0);
    const Moments mx = unconditional_moments(x_spec, phi);
    CHECK(std::abs(mx.mean_q) <= 1e-9);
    CHECK(mx.var_q == doctest::Approx(1.09).epsilon(1e-9));
}

TEST_CASE("unconditional coupling never disturbs the momentum density") {
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.4, 1.0, 0.3);
    const Moments before = moments(phi);
    const Moments after = unconditional_moments(canonical(0.6), phi);
    CHECK(std::abs(after.mean_p - before.mean_p) <= 1e-9);
    CHECK(std::abs(after.var_p - before.var_p) <= 1e-9);
}

TEST_CASE("full tensor reference agrees with the exact backend") {
    const Grid grid = build_grid(128, 40.0);
    double worst_amp = 0.0, worst_succ = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(92, static_cast<std::uint64_t>(trial));
        const int dim = 2 + static_cast<int>(rng.uniform_index(3));
        CouplingSpec spec;
        spec.observable = random_observable(rng, dim);
        spec.psi_i = random_state(rng, dim);
        spec.psi_f = random_state(rng, dim);
        spec.g = rng.uniform(0.01, 0.6);
        const PointerState phi = make_gaussian(
            grid, rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5),
            rng.uniform(0.9, 1.4), rng.uniform(-0.4, 0.4));

        const PostSelectedPointer left = couple_postselect_exact(spec, phi);
        const PostSelectedPointer right = full_tensor_reference(spec, phi);
        worst_amp =
            std::max(worst_amp, max_abs_diff(left.amplitudes, right.amplitudes));
        worst_succ = std::max(
            worst_succ, std::abs(left.success_prob - right.success_prob));
    }
    CHECK(worst_amp <= 1e-10);
    CHECK(worst_succ <= 1e-12);
}

TEST_CASE("full tensor reference is size guarded") {
    const Grid huge = build_grid(262144, 2000.0);
    CouplingSpec spec;
    spec.g = 0.1;
    spec.observable = make_observable(Eigen::MatrixXcd::Identity(4, 4));
    spec.psi_i = make_state(Eigen::VectorXcd::Ones(4));
    spec.psi_f = spec.psi_i;
    const PointerState phi = make_gaussian(huge, 0.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(full_tensor_reference(spec, phi), SizeGuard);
}

TEST_CASE("success probabilities over a complete post-selection basis sum to one") {
    Rng rng(93);
    CouplingSpec spec;
    spec.g = 0.7;
    spec.observable = random_observable(rng, 3);
    spec.psi_i = random_state(rng, 3);
    const PointerState phi = make_gaussian(kSmall, 0.0, 0.2, 1.0, 0.1);

    double total = 0.0;
    for (int s = 0; s < 3; ++s) {
        Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(3);
        basis(s) = 1.0;
        spec.psi_f = make_state(basis);
        total += couple_postselect_exact(spec, phi).success_prob;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("backend hierarchy: deviations scale as g^2") {
    const PointerState phi = make_gaussian(kBig, 0.0, 0.3, 1.0, 0.5);
    const std::vector<double> ladder = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
    std::vector<double> l2_fo, dq_we, dp_we;
    const double dq = kBig.spacing();
    for (const double g : ladder) {
        const PostSelectedPointer exact =
            couple_postselect_exact(skewed(g), phi);
        const PostSelectedPointer fo =
            couple_postselect_first_order(skewed(g), phi);
        const PostSelectedPointer we =
            couple_postselect_weak_exp(skewed(g), phi);

        double acc = 0.0;
        for (std::size_t j = 0; j < exact.amplitudes.size(); ++j)
            acc += std::norm(exact.amplitudes[j] - fo.amplitudes[j]);
        l2_fo.push_back(std::sqrt(acc * dq));

        const Moments me = moments(conditioned_pointer(exact));
        const Moments mw = moments(conditioned_pointer(we));
        dq_we.push_back(std::abs(me.mean_q - mw.mean_q));
        dp_we.push_back(std::abs(me.mean_p - mw.mean_p));
    }
    CHECK(lsq_slope(ladder, l2_fo) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(lsq_slope(ladder, dq_we) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(lsq_slope(ladder, dp_we) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("backends agree on the conditioned shift at moderate coupling") {
    const PointerState phi = make_gaussian(kBig, 0.0, 0.3, 1.0, 0.5);
    const double g = 1e-2;
    const double q0 = moments(phi).mean_q;
    std::vector<double> shifts;
    for (const auto& alpha :
         {couple_postselect_exact(skewed(g), phi),
          couple_postselect_first_order(skewed(g), phi),
          couple_postselect_weak_exp(skewed(g), phi)})
        shifts.push_back(moments(conditioned_pointer(alpha)).mean_q - q0);
    CHECK(std::abs(shifts[0] - shifts[1]) <= 10.0 * g * g);
    CHECK(std::abs(shifts[0] - shifts[2]) <= 10.0 * g * g);
    CHECK(std::abs(shifts[1] - shifts[2]) <= 10.0 * g * g);
}
