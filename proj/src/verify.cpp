#include "weaksim/verify.hpp"

#include "weaksim/errors.hpp"
#include "weaksim/harness.hpp"
#include "weaksim/measurement.hpp"
#include "weaksim/rng.hpp"
#include "weaksim/scenario.hpp"
#include "weaksim/system.hpp"
#include "weaksim/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace weaksim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Accumulates sub-checks; any failed sub-check fails the criterion but the
// remaining ones still run, so the detail string shows everything at once.
struct Checks {
    bool pass = true;
    std::string detail;

    void record(bool ok, const std::string& text) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        if (!ok) detail += "FAIL ";
        detail += text;
    }
};

SystemState qubit(cplx c0, cplx c1) {
    Eigen::VectorXcd v(2);
    v << c0, c1;
    return make_state(v);
}

// The workhorse configuration: A_w = i on a chirped Gaussian.  Both shift
// laws are exercised at once (the chirp feeds the q channel, Im A_w the p
// channel).
Scenario canonical_scenario(double g) {
    Scenario sc;
    sc.id = "canonical";
    sc.grid = build_grid(1024, 80.0);
    sc.backend = Backend::exact;
    sc.sigma = 1.0;
    sc.chirp = 0.5;
    sc.q0 = 0.0;
    sc.p0 = 0.0;
    sc.coupling.g = g;
    sc.coupling.mass = 1.0;
    sc.coupling.observable = named_observable("pauli-z");
    sc.coupling.psi_i = qubit(1.0, 1.0);
    sc.coupling.psi_f = qubit(1.0, cplx(0.0, 1.0));
    return sc;
}

// Sweep configuration for the convergence-order fit.  The canonical A_w = i
// setup is useless here: with |c_+| = |c_-|, purely imaginary branch product
// and a symmetric pointer, every second-order residual coefficient cancels
// and the measured slopes sit near 3 (success probability is exactly 1/2 at
// all g).  Tilting the post-selection and boosting the pointer breaks those
// cancellations so all three channels show their generic O(g^2) behaviour.
Scenario sweep_scenario(double g) {
    Scenario sc = canonical_scenario(g);
    sc.id = "sweep";
    sc.p0 = 0.3;
    sc.coupling.psi_f =
        qubit(std::cos(0.6), std::polar(std::sin(0.6), 0.7));
    return sc;
}

const std::vector<double> kSweepLadder = {1e-3, 3e-3, 1e-2, 3e-2};

// Real-valued but lopsided pointer: two Gaussian humps of different widths
// and heights.  Real states have zero phase gradient everywhere, yet none of
// the parity cancellations of a centred Gaussian apply.
PointerState asymmetric_real_pointer(const Grid& grid) {
    cvec samples(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const double q = grid.position(j);
        const double lobe1 = std::exp(-0.25 * (q + 1.0) * (q + 1.0));
        const double lobe2 =
            0.6 * std::exp(-(q - 1.5) * (q - 1.5) / (4.0 * 0.64));
        samples[j] = lobe1 + lobe2;
    }
    return pointer_from_samples(grid, samples);
}

int effective(int requested, int fallback) {
    return requested > 0 ? requested : fallback;
}

// --- randomized scenario batteries ------------------------------------------

Scenario random_unconditional_scenario(Rng& rng) {
    Scenario sc;
    const int dim = 2 + static_cast<int>(rng.uniform_index(3));
    sc.grid = build_grid(256, 60.0);
    sc.sigma = rng.uniform(0.8, 1.5);
    sc.chirp = rng.uniform(-0.5, 0.5);
    sc.q0 = rng.uniform(-2.0, 2.0);
    sc.p0 = rng.uniform(-1.0, 1.0);
    sc.coupling.g = rng.uniform(0.1, 1.0);
    sc.coupling.mass = rng.uniform(0.5, 2.0);
    sc.coupling.observable = random_observable(rng, dim);
    sc.coupling.psi_i = random_state(rng, dim);
    sc.coupling.psi_f = random_state(rng, dim);
    return sc;
}

Scenario random_oracle_scenario(Rng& rng) {
    // 128-point grids under-resolve a chirped+boosted spectrum on L=60 (the
    // band edge sits at 6.7), and the tail guard rightly refuses the
    // translated states.  Stick to grids with real headroom.
    static const std::size_t sizes[2] = {256, 512};
    Scenario sc;
    const int dim = 2 + static_cast<int>(rng.uniform_index(3));
    sc.grid = build_grid(sizes[rng.uniform_index(2)], 60.0);
    sc.sigma = rng.uniform(0.9, 1.4);
    sc.chirp = rng.uniform(-0.5, 0.5);
    sc.q0 = rng.uniform(-2.0, 2.0);
    sc.p0 = rng.uniform(-1.0, 1.0);
    sc.coupling.g = rng.uniform(1e-3, 0.3);
    sc.coupling.mass = 1.0;
    sc.coupling.observable = random_observable(rng, dim);
    sc.coupling.psi_i = random_state(rng, dim);
    sc.coupling.psi_f = random_state(rng, dim);
    return sc;
}

// Round-trip battery: weak coupling, centred pointer, and a post-selection
// kept at healthy overlap so the weak value stays O(1) and the inversion is
// dominated by genuine O(g^2) truncation instead of near-orthogonal blowup.
std::vector<Scenario> roundtrip_scenarios(const BatteryOptions& opt) {
    const int cases = effective(opt.roundtrip_cases, 100);
    std::vector<Scenario> out;
    out.reserve(static_cast<std::size_t>(cases));
    for (int i = 0; i < cases; ++i) {
        Rng rng(opt.seed, 0xB00 + static_cast<std::uint64_t>(i));
        Scenario sc;
        sc.id = "roundtrip-" + std::to_string(i);
        const int dim = 2 + static_cast<int>(rng.uniform_index(3));
        sc.grid = build_grid(512, 60.0);
        sc.sigma = 1.0;
        sc.chirp = 0.5;
        sc.q0 = 0.0;
        sc.p0 = 0.0;
        sc.coupling.g = 1e-3;
        sc.coupling.mass = rng.uniform(0.5, 2.0);
        sc.coupling.observable = random_observable(rng, dim);
        sc.coupling.psi_i = random_state(rng, dim);
        SystemState psi_f = random_state(rng, dim);
        int tries = 0;
        while (std::abs(inner_product(psi_f, sc.coupling.psi_i)) < 0.5) {
            psi_f = random_state(rng, dim);
            if (++tries > 10000)
                throw BadScenario("roundtrip battery: post-selection draw "
                                  "did not converge");
        }
        sc.coupling.psi_f = psi_f;
        out.push_back(std::move(sc));
    }
    return out;
}

// --- criteria ---------------------------------------------------------------

void criterion_1(const BatteryOptions& opt, Checks& c) {
    const Observable z = named_observable("pauli-z");
    const Observable x = named_observable("pauli-x");
    const SystemState plus = qubit(1.0, 1.0);
    const SystemState plus_i = qubit(1.0, cplx(0.0, 1.0));

    const WeakValue w = weak_value(z, plus, plus_i);
    c.record(std::abs(w.a) <= 1e-12 && std::abs(w.b - 1.0) <= 1e-12,
             "A_w(Z, +, +i) = " + num(w.a) + "+" + num(w.b) + "i vs i");

    const WeakValue e0 = weak_value(z, qubit(1.0, 0.0),
                                    qubit(std::cos(0.4), std::sin(0.4)));
    const WeakValue e1 = weak_value(z, qubit(0.0, 1.0),
                                    qubit(std::sin(0.4), std::cos(0.4)));
    const WeakValue ex = weak_value(x, plus, qubit(1.0, 0.0));
    c.record(std::abs(e0.a - 1.0) <= 1e-12 && std::abs(e0.b) <= 1e-12 &&
                 std::abs(e1.a + 1.0) <= 1e-12 && std::abs(e1.b) <= 1e-12 &&
                 std::abs(ex.a - 1.0) <= 1e-12 && std::abs(ex.b) <= 1e-12,
             "eigenstate cases return the eigenvalue");

    Rng rng(opt.seed, 0x100);
    const Observable a3 = random_observable(rng, 3);
    const SpectralDecomposition dec = eigendecompose(a3);
    const SystemState eig = make_state(dec.eigenvectors.col(1));
    SystemState psi_f = random_state(rng, 3);
    while (std::abs(inner_product(psi_f, eig)) < 0.2)
        psi_f = random_state(rng, 3);
    const WeakValue we = weak_value(a3, eig, psi_f);
    c.record(std::abs(we.a - dec.eigenvalues(1)) <= 1e-11 &&
                 std::abs(we.b) <= 1e-11,
             "random dim-3 eigenstate: |A_w - lambda| = " +
                 num(std::abs(we.a - dec.eigenvalues(1))));

    const int reps = 1000;
    const auto start = Clock::now();
    volatile double sink = 0.0;
    for (int i = 0; i < reps; ++i) {
        const WeakValue wt = weak_value(z, plus, plus_i);
        sink = sink + wt.b;
    }
    const double avg_ms = seconds_since(start) * 1000.0 / reps;
    c.record(avg_ms < 1.0, "mean evaluation " + num(avg_ms) + " ms < 1 ms");
}

void criterion_2(const BatteryOptions&, Checks& c) {
    const ScenarioResult fine = run_scenario(canonical_scenario(1e-3));
    c.record(std::abs(fine.predicted.delta_q - 0.002) <= 1e-9,
             "predicted dq = " + num(fine.predicted.delta_q) + " vs 0.002");
    c.record(fine.r_q <= 1e-5,
             "r_q = " + num(fine.r_q) + " <= 1e-5 at g=1e-3");

    const ScenarioResult coarse = run_scenario(canonical_scenario(1e-2));
    c.record(coarse.r_q <= 1e-3,
             "r_q = " + num(coarse.r_q) + " <= 1e-3 at g=1e-2");
}

void criterion_3(const BatteryOptions&, Checks& c) {
    const ScenarioResult res = run_scenario(canonical_scenario(1e-3));
    c.record(std::abs(res.predicted.delta_p - 2.5e-3) <= 1e-9,
             "predicted dp = " + num(res.predicted.delta_p) + " vs 0.0025");
    c.record(res.r_p <= 1e-5, "r_p = " + num(res.r_p) + " <= 1e-5 at g=1e-3");
}

void criterion_4(const BatteryOptions&, Checks& c) {
    const ConvergenceReport rep = sweep_g(sweep_scenario(1e-3), kSweepLadder);
    for (const ConvergenceChannel* ch :
         {&rep.q_channel, &rep.p_channel, &rep.succ_channel}) {
        c.record(!ch->at_floor && std::abs(ch->slope - 2.0) <= 0.2,
                 ch->name + " slope = " + num(ch->slope) +
                     (ch->at_floor ? " (at floor)" : ""));
    }
}

void criterion_5(const BatteryOptions& opt, Checks& c) {
    // (i) real weak value: first-order momentum shift vanishes.
    {
        Scenario sc = canonical_scenario(0.1);
        sc.coupling.psi_i = qubit(1.0, 0.0);
        sc.coupling.psi_f = qubit(std::cos(0.4), std::sin(0.4));
        const ScenarioResult res = run_scenario(sc);
        const CaseReport rep =
            special_case_checks(res.w, scenario_pointer(sc), sc.coupling.mass);
        c.record(res.r_p <= 1e-9 && rep.real_weak_value,
                 "(i) eigenstate r_p = " + num(res.r_p));
    }
    {
        Rng rng(opt.seed, 0x500);
        Scenario sc = canonical_scenario(0.2);
        sc.coupling.observable = random_observable(rng, 3);
        const SpectralDecomposition dec =
            eigendecompose(sc.coupling.observable);
        sc.coupling.psi_i = make_state(dec.eigenvectors.col(0));
        SystemState psi_f = random_state(rng, 3);
        while (std::abs(inner_product(psi_f, sc.coupling.psi_i)) < 0.2)
            psi_f = random_state(rng, 3);
        sc.coupling.psi_f = psi_f;
        const ScenarioResult res = run_scenario(sc);
        c.record(res.r_p <= 1e-9,
                 "(i) random eigenstate r_p = " + num(res.r_p));
    }
    {
        // real A_w, real pointer: both reductions at once, floor at finite g
        Scenario sc = canonical_scenario(0.05);
        sc.chirp = 0.0;
        sc.coupling.observable = named_observable("pauli-x");
        sc.coupling.psi_i = qubit(1.0, 0.0);
        sc.coupling.psi_f = qubit(std::cos(0.3), std::sin(0.3));
        const PointerState pointer = scenario_pointer(sc);
        const ScenarioResult res = run_scenario(sc, pointer);
        const CaseReport rep =
            special_case_checks(res.w, pointer, sc.coupling.mass);
        const bool coeff_ok = rep.delta_q_per_g.has_value() &&
                              std::abs(*rep.delta_q_per_g - res.w.a) <= 1e-12;
        c.record(res.r_p <= 1e-9 && rep.real_weak_value && rep.real_pointer &&
                     coeff_ok,
                 "(i) real A_w + real pointer r_p = " + num(res.r_p));
    }
    {
        // generic b = 0 with a chirped, boosted pointer: the shift law is
        // first-order only, so the residual must die quadratically.
        Scenario base = canonical_scenario(1e-3);
        base.p0 = 0.3;
        base.coupling.observable = named_observable("pauli-x");
        base.coupling.psi_i = qubit(1.0, 0.0);
        base.coupling.psi_f = qubit(std::cos(0.3), std::sin(0.3));
        const ScenarioResult r1 = run_scenario(base);
        Scenario twice = base;
        twice.coupling.g = 2e-3;
        const ScenarioResult r2 = run_scenario(twice);
        bool ok = std::abs(r1.w.b) <= 1e-12 && r1.r_p <= 10.0 * 1e-3 * 1e-3;
        std::string note = "(i) b=0 chirped r_p = " + num(r1.r_p);
        if (r1.r_p > 1e-9) {
            const double ratio = r2.r_p / r1.r_p;
            ok = ok && ratio >= 3.0 && ratio <= 5.5;
            note += ", doubling ratio " + num(ratio);
        }
        c.record(ok, note);
    }

    // (ii) purely imaginary weak value on real pointers.
    {
        // qubit branch: parity makes the q shift vanish outright
        Scenario sc = canonical_scenario(1e-2);
        sc.chirp = 0.0;
        const ScenarioResult res = run_scenario(sc);
        const CaseReport rep =
            special_case_checks(res.w, scenario_pointer(sc), sc.coupling.mass);
        const double bound = 10.0 * sc.coupling.g * sc.coupling.g;
        const bool coeff_ok =
            rep.delta_p_per_g.has_value() &&
            std::abs(*rep.delta_p_per_g - 2.0 * res.w.b * res.before.var_p) <=
                1e-9;
        c.record(res.r_q <= bound && res.r_p <= bound && rep.real_pointer &&
                     coeff_ok,
                 "(ii) qubit real pointer r_q = " + num(res.r_q) +
                     ", r_p = " + num(res.r_p));
    }
    {
        // three-branch coupling built so A_w = i/2 exactly while the branch
        // magnitudes stay unequal -- the quadratic terms survive here.
        const double beta = 0.5;
        const cplx c1(1.0, 0.0);
        const cplx c2 = 0.4 * std::polar(1.0, 0.9);
        const cplx ib(0.0, beta);
        const cplx c3 = (c1 - ib * (c1 + c2)) / (cplx(1.0, 0.0) + ib);

        Eigen::VectorXcd vi(3), vf(3);
        const cplx cs[3] = {c1, c2, c3};
        for (int k = 0; k < 3; ++k) {
            const double mag = std::sqrt(std::abs(cs[k]));
            vi(k) = mag;
            vf(k) = std::conj(cs[k]) / mag;
        }
        Eigen::MatrixXcd spin1 = Eigen::MatrixXcd::Zero(3, 3);
        spin1(0, 0) = 1.0;
        spin1(2, 2) = -1.0;

        Scenario sc = canonical_scenario(1e-3);
        sc.chirp = 0.0;
        sc.coupling.observable = make_observable(spin1);
        sc.coupling.psi_i = make_state(vi);
        sc.coupling.psi_f = make_state(vf);

        const ScenarioResult r1 = run_scenario(sc);
        c.record(std::abs(r1.w.a) <= 1e-10 &&
                     std::abs(r1.w.b - beta) <= 1e-10,
                 "(ii) constructed A_w = " + num(r1.w.a) + "+" + num(r1.w.b) +
                     "i vs 0.5i");

        Scenario twice = sc;
        twice.coupling.g = 2e-3;
        const ScenarioResult r2 = run_scenario(twice);
        const double bound = 50.0 * sc.coupling.g * sc.coupling.g;
        bool ok = r1.r_q <= bound && r1.r_p <= bound;
        std::string note = "(ii) three-branch r_q = " + num(r1.r_q) +
                           ", r_p = " + num(r1.r_p);
        if (r1.r_q > 1e-9) {
            const double ratio = r2.r_q / r1.r_q;
            ok = ok && ratio >= 3.0 && ratio <= 5.5;
            note += ", q doubling ratio " + num(ratio);
        }
        if (r1.r_p > 1e-9) {
            const double ratio = r2.r_p / r1.r_p;
            ok = ok && ratio >= 3.0 && ratio <= 5.5;
            note += ", p doubling ratio " + num(ratio);
        }
        c.record(ok, note);
    }
}

void criterion_6(const BatteryOptions& opt, Checks& c) {
    const int cases = effective(opt.unconditional_cases, 50);
    double worst_q = 0.0;
    double worst_inv = 0.0;
    for (int i = 0; i < cases; ++i) {
        Rng rng(opt.seed, 0x600 + static_cast<std::uint64_t>(i));
        const Scenario sc = random_unconditional_scenario(rng);
        const PointerState pointer = scenario_pointer(sc);
        const Moments before = moments(pointer);
        const Moments after = unconditional_moments(sc.coupling, pointer);
        const double expect =
            expectation(sc.coupling.observable, sc.coupling.psi_i);
        worst_q = std::max(worst_q,
                           std::abs((after.mean_q - before.mean_q) -
                                    sc.coupling.g * expect));
        worst_inv = std::max({worst_inv,
                              std::abs(after.mean_p - before.mean_p),
                              std::abs(after.var_p - before.var_p)});
    }
    c.record(worst_q <= 1e-9, "worst |dq - g<A>| = " + num(worst_q) +
                                  " over " + std::to_string(cases) + " cases");
    c.record(worst_inv <= 1e-9,
             "worst momentum-moment drift = " + num(worst_inv));
}

void criterion_7(const BatteryOptions& opt, Checks& c) {
    const int cases = effective(opt.oracle_cases, 200);
    double worst = 0.0;
    double worst_succ = 0.0;
    for (int i = 0; i < cases; ++i) {
        Rng rng(opt.seed, 0x700 + static_cast<std::uint64_t>(i));
        const Scenario sc = random_oracle_scenario(rng);
        const PointerState pointer = scenario_pointer(sc);
        const PostSelectedPointer fast =
            couple_postselect_exact(sc.coupling, pointer);
        const PostSelectedPointer slow =
            full_tensor_reference(sc.coupling, pointer);
        for (std::size_t j = 0; j < pointer.grid.n_points; ++j)
            worst = std::max(worst,
                             std::abs(fast.amplitudes[j] - slow.amplitudes[j]));
        worst_succ =
            std::max(worst_succ, std::abs(fast.success_prob - slow.success_prob));
    }
    c.record(worst <= 1e-10, "worst amplitude deviation = " + num(worst) +
                                 " over " + std::to_string(cases) + " cases");
    c.record(worst_succ <= 1e-10,
             "worst success-probability deviation = " + num(worst_succ));
}

void criterion_8(const BatteryOptions&, Checks& c) {
    EvolutionSpec spec;
    spec.mass = 1.0;
    spec.dt = 1e-4;

    const PointerState base =
        make_gaussian(build_grid(1024, 80.0), 0.0, 0.3, 1.0, 0.5);
    const double res_base = continuity_residual(base, spec);
    c.record(res_base <= 1e-6,
             "residual = " + num(res_base) + " at N=1024 (canonical state)");

    // Strongly chirped state: the current's spectrum grazes the band edge at
    // N=1024, so spatial error dominates there and dies under refinement.
    EvolutionSpec heavy;
    heavy.mass = 4.0;
    heavy.dt = 1e-4;
    const double chirp = 2.4;
    const PointerState coarse =
        make_gaussian(build_grid(1024, 80.0), 0.0, 0.0, 1.0, chirp);
    const PointerState fine =
        make_gaussian(build_grid(2048, 80.0), 0.0, 0.0, 1.0, chirp);
    const double res_coarse = continuity_residual(coarse, heavy);
    const double res_fine = continuity_residual(fine, heavy);
    c.record(res_coarse <= 1e-6,
             "residual = " + num(res_coarse) + " at N=1024 (chirped state)");
    c.record(res_fine < res_coarse, "refined residual = " + num(res_fine) +
                                        " < " + num(res_coarse));
}

void criterion_9(const BatteryOptions&, Checks& c) {
    struct Family {
        double sigma, chirp, mass, p0;
    };
    const Family families[] = {
        {1.0, 0.5, 1.0, 0.0},
        {1.3, -0.4, 2.0, 0.0},
        {0.9, 0.0, 1.0, 0.6},
        {1.0, 0.5, 3.0, 0.3},
    };
    const Grid grid = build_grid(1024, 80.0);
    const double dt = 1e-3;

    double worst_alg = 0.0;
    double worst_fd = 0.0;
    auto fd_rate = [&](const PointerState& ptr, const EvolutionSpec& spec,
                       double step) {
        EvolutionSpec fwd = spec;
        fwd.dt = step;
        EvolutionSpec bwd = spec;
        bwd.dt = -step;
        const double vf = moments(evolve_free(ptr, fwd, 1)).var_q;
        const double vb = moments(evolve_free(ptr, bwd, 1)).var_q;
        return (vf - vb) / (2.0 * step);
    };

    for (const Family& f : families) {
        const PointerState ptr = make_gaussian(grid, 0.0, f.p0, f.sigma, f.chirp);
        const double analytic = 4.0 * f.chirp * f.sigma * f.sigma / f.mass;
        const double algebraic = d_var_q_dt(ptr, f.mass);
        worst_alg = std::max(worst_alg, std::abs(algebraic - analytic));

        EvolutionSpec spec;
        spec.mass = f.mass;
        worst_fd = std::max(worst_fd,
                            std::abs(fd_rate(ptr, spec, dt) - algebraic));
    }
    c.record(worst_alg <= 1e-9,
             "worst |algebraic - 4 c sigma^2/m| = " + num(worst_alg));
    c.record(worst_fd <= 1e-6,
             "worst |finite difference - algebraic| = " + num(worst_fd));

    // bounded potential: the instantaneous rate is potential-independent,
    // and the finite-difference error stays O(dt^2)
    const PointerState ptr = make_gaussian(grid, 0.0, 0.3, 1.0, 0.5);
    const double algebraic = d_var_q_dt(ptr, 1.0);
    EvolutionSpec with_v;
    with_v.mass = 1.0;
    with_v.potential.resize(grid.n_points);
    for (std::size_t j = 0; j < grid.n_points; ++j)
        with_v.potential[j] = 2.0 * std::cos(0.3 * grid.position(j));

    const double err1 = std::abs(fd_rate(ptr, with_v, dt) - algebraic);
    const double err2 = std::abs(fd_rate(ptr, with_v, 2.0 * dt) - algebraic);
    bool ok = err1 <= 1e-6;
    std::string note = "potential case error = " + num(err1);
    if (err1 > 1e-10) {
        const double ratio = err2 / err1;
        ok = ok && ratio >= 2.5 && ratio <= 6.0;
        note += ", dt-doubling ratio " + num(ratio);
    }
    c.record(ok, note);
}

void criterion_10(const BatteryOptions&, Checks& c) {
    const Grid grid = build_grid(1024, 80.0);
    std::vector<PointerState> pointers;
    pointers.push_back(make_gaussian(grid, 0.0, 0.0, 1.0, 0.5));
    pointers.push_back(make_gaussian(grid, 2.3, -0.8, 1.0, 0.5));
    pointers.push_back(make_gaussian(grid, 0.0, 0.0, 2.0, -0.4));
    pointers.push_back(make_gaussian(grid, 0.0, 1.5, 0.8, 0.0));
    pointers.push_back(asymmetric_real_pointer(grid));

    const WeakValue values[] = {
        {0.0, 1.0},
        {std::cos(1.2), std::sin(1.2)},
        {std::sqrt(3.0), 0.0},
        {-0.7, 0.35},
        {2.0, -1.0},
    };
    const double g = 0.01;
    const double mass = 1.0;
    const PointerObservable pos = PointerObservable::position();
    const PointerObservable mom = PointerObservable::momentum();

    double worst = 0.0;
    for (const PointerState& ptr : pointers) {
        for (const WeakValue& w : values) {
            const ShiftPrediction shift = predict_shifts(w, g, ptr, mass);
            const double mq = predict_general_observable(w, g, ptr, pos);
            const double mp = predict_general_observable(w, g, ptr, mom);
            worst = std::max({worst, std::abs(mq - shift.mean_q_f),
                              std::abs(mp - shift.mean_p_f)});
        }
    }
    c.record(worst <= 1e-10, "worst |general - specialized| = " + num(worst) +
                                 " over 25 pointer/value pairs");
}

void criterion_11(const BatteryOptions& opt, Checks& c) {
    const std::vector<Scenario> battery = roundtrip_scenarios(opt);
    const double bound = 5.0 * 1e-3; // 5g at g = 1e-3
    double worst = 0.0;
    for (const Scenario& sc : battery) {
        const PointerState pointer = scenario_pointer(sc);
        const ScenarioResult res = run_scenario(sc, pointer);
        const WeakValue est = estimate_weak_value(
            res.after.mean_q - res.before.mean_q,
            res.after.mean_p - res.before.mean_p, sc.coupling.g, pointer,
            sc.coupling.mass);
        worst = std::max({worst, std::abs(est.a - res.w.a),
                          std::abs(est.b - res.w.b)});
    }
    c.record(worst <= bound,
             "worst estimator error = " + num(worst) + " <= " + num(bound) +
                 " over " + std::to_string(battery.size()) + " scenarios");
}

} // namespace

std::string battery_report_csv(const BatteryOptions& opt) {
    std::vector<ScenarioResult> rows;
    rows.push_back(run_scenario(canonical_scenario(1e-3)));
    rows.push_back(run_scenario(canonical_scenario(1e-2)));
    for (double g : kSweepLadder)
        rows.push_back(run_scenario(sweep_scenario(g)));
    for (const Scenario& sc : roundtrip_scenarios(opt))
        rows.push_back(run_scenario(sc));
    return report_csv(rows);
}

std::vector<CriterionResult> run_acceptance_battery(const BatteryOptions& opt) {
    struct Entry {
        int id;
        const char* name;
        std::function<void(const BatteryOptions&, Checks&)> body;
        double limit_seconds; // 0: no per-criterion limit
    };
    const Entry entries[] = {
        {1, "weak value arithmetic", criterion_1, 0.0},
        {2, "position shift law", criterion_2, 1.0},
        {3, "momentum shift law", criterion_3, 1.0},
        {4, "first-order residual convergence", criterion_4, 10.0},
        {5, "special-case regimes", criterion_5, 0.0},
        {6, "unconditional mean shift", criterion_6, 0.0},
        {7, "exact backend vs tensor reference", criterion_7, 30.0},
        {8, "continuity equation", criterion_8, 0.0},
        {9, "variance growth rate", criterion_9, 0.0},
        {10, "general observable response", criterion_10, 0.0},
        {11, "estimator round trip", criterion_11, 0.0},
    };

    const auto battery_start = Clock::now();
    std::vector<CriterionResult> results;
    for (const Entry& entry : entries) {
        CriterionResult res;
        res.id = entry.id;
        res.name = entry.name;
        Checks checks;
        const auto start = Clock::now();
        try {
            entry.body(opt, checks);
        } catch (const std::exception& err) {
            checks.pass = false;
            if (!checks.detail.empty()) checks.detail += "; ";
            checks.detail += std::string("exception: ") + err.what();
        }
        res.seconds = seconds_since(start);
        if (entry.limit_seconds > 0.0 && res.seconds >= entry.limit_seconds)
            checks.record(false, "runtime " + num(res.seconds) + " s over " +
                                     num(entry.limit_seconds) + " s budget");
        res.pass = checks.pass;
        res.detail = checks.detail;
        results.push_back(std::move(res));
    }

    // determinism + total runtime close out the battery
    CriterionResult det;
    det.id = 12;
    det.name = "determinism and runtime";
    Checks checks;
    const auto start = Clock::now();
    try {
        const std::string first = battery_report_csv(opt);
        const std::string second = battery_report_csv(opt);
        checks.record(!first.empty() && first == second,
                      "report CSV is byte-identical across runs (" +
                          std::to_string(first.size()) + " bytes)");
    } catch (const std::exception& err) {
        checks.pass = false;
        checks.detail += std::string("exception: ") + err.what();
    }
    det.seconds = seconds_since(start);
    const double total = seconds_since(battery_start);
    checks.record(total < 120.0,
                  "battery runtime " + num(total) + " s < 120 s");
    det.pass = checks.pass;
    det.detail = checks.detail;
    results.push_back(std::move(det));
    return results;
}

} // namespace weaksim
