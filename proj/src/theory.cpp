#include "weaksim/theory.hpp"

#include "weaksim/errors.hpp"
#include "weaksim/rng.hpp"

#include <cmath>
#include <utility>

namespace weaksim {

namespace {

cplx grid_inner(const Grid& grid, const cvec& a, const cvec& b) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
    return s * grid.spacing();
}

} // namespace

ShiftPrediction predict_shifts(const WeakValue& w, double g,
                               const PointerState& pointer, double mass) {
    const Moments m = moments(pointer);
    const double rate = d_var_q_dt(pointer, mass);
    ShiftPrediction p;
    p.delta_q = g * w.a + g * w.b * mass * rate;
    p.delta_p = 2.0 * g * w.b * m.var_p;
    p.mean_q_f = m.mean_q + p.delta_q;
    p.mean_p_f = m.mean_p + p.delta_p;
    return p;
}

PointerObservable::PointerObservable(std::vector<Factor> factors,
                                     std::string label)
    : factors_(std::move(factors)), label_(std::move(label)) {
    if (factors_.empty())
        throw BadScenario("pointer observable: no factors");
    for (const auto& f : factors_)
        if (f.power < 1 || f.power > 4)
            throw BadScenario("pointer observable: factor power " +
                              std::to_string(f.power) + " out of range 1..4");
    check_hermitian();
}

PointerObservable PointerObservable::position() {
    return PointerObservable({Factor{true, 1}}, "q");
}

PointerObservable PointerObservable::momentum() {
    return PointerObservable({Factor{false, 1}}, "p");
}

PointerObservable PointerObservable::position_squared() {
    return PointerObservable({Factor{true, 2}}, "q^2");
}

PointerObservable PointerObservable::composite(std::vector<Factor> factors) {
    std::string label;
    for (const auto& f : factors) {
        label += f.in_position_space ? "q" : "p";
        if (f.power != 1) label += "^" + std::to_string(f.power);
    }
    return PointerObservable(std::move(factors), std::move(label));
}

cvec PointerObservable::apply(const Grid& grid, const cvec& amplitudes) const {
    if (amplitudes.size() != grid.n_points)
        throw DimMismatch("pointer observable: sample count mismatch");
    cvec out = amplitudes;
    // Rightmost factor acts first.
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
        if (it->in_position_space) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                const double q = grid.position(j);
                double w = 1.0;
                for (int k = 0; k < it->power; ++k) w *= q;
                out[j] *= w;
            }
        } else {
            fft_forward(out);
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double k = grid.momentum(i);
                double w = 1.0;
                for (int n = 0; n < it->power; ++n) w *= k;
                out[i] *= w;
            }
            fft_inverse(out);
        }
    }
    return out;
}

double PointerObservable::expectation(const PointerState& state) const {
    const cvec m_phi = apply(state.grid, state.amplitudes);
    return std::real(grid_inner(state.grid, state.amplitudes, m_phi));
}

void PointerObservable::check_hermitian() const {
    // Pair-symmetry probe on a fixed bank of random chirped Gaussians.
    // <phi|M chi> must equal conj(<chi|M phi>) for a Hermitian product.
    const Grid grid = build_grid(128, 40.0);
    Rng rng(0x7C3A9D2E5F114B08ULL);
    for (int trial = 0; trial < 8; ++trial) {
        const PointerState phi =
            make_gaussian(grid, rng.uniform(-2.0, 2.0), rng.uniform(-1.5, 1.5),
                          rng.uniform(0.8, 1.6), rng.uniform(-0.6, 0.6));
        const PointerState chi =
            make_gaussian(grid, rng.uniform(-2.0, 2.0), rng.uniform(-1.5, 1.5),
                          rng.uniform(0.8, 1.6), rng.uniform(-0.6, 0.6));
        const cplx lhs = grid_inner(grid, phi.amplitudes,
                                    apply(grid, chi.amplitudes));
        const cplx rhs = std::conj(
            grid_inner(grid, chi.amplitudes, apply(grid, phi.amplitudes)));
        if (std::abs(lhs - rhs) > 1e-10)
            throw NonHermitianObservable(
                "pointer observable '" + label_ +
                "' fails the Hermitian pairing check by " +
                std::to_string(std::abs(lhs - rhs)));
    }
}

double predict_general_observable(const WeakValue& w, double g,
                                  const PointerState& pointer,
                                  const PointerObservable& m) {
    const Grid& grid = pointer.grid;
    const cvec m_phi = m.apply(grid, pointer.amplitudes);
    const cvec p_phi = apply_momentum(grid, pointer.amplitudes);
    const cvec p_m_phi = apply_momentum(grid, m_phi);
    const cvec m_p_phi = m.apply(grid, p_phi);

    const cplx exp_m = grid_inner(grid, pointer.amplitudes, m_phi);
    const cplx exp_pm = grid_inner(grid, pointer.amplitudes, p_m_phi);
    const cplx exp_mp = grid_inner(grid, pointer.amplitudes, m_p_phi);
    const cplx exp_p = grid_inner(grid, pointer.amplitudes, p_phi);

    const cplx commutator_term = cplx(0.0, 1.0) * (exp_pm - exp_mp);
    if (std::abs(commutator_term.imag()) > 1e-10)
        throw InvariantViolation(
            "predict_general_observable: i<[p,M]> has imaginary residue " +
            std::to_string(commutator_term.imag()));

    const double anticommutator = std::real(exp_pm + exp_mp);
    return std::real(exp_m) + g * w.a * commutator_term.real() +
           g * w.b *
               (anticommutator - 2.0 * std::real(exp_p) * std::real(exp_m));
}

CaseReport special_case_checks(const WeakValue& w, const PointerState& pointer,
                               double mass) {
    CaseReport report;
    report.real_weak_value = std::abs(w.b) <= 1e-12;

    const PolarFields fields = polar_fields(pointer, mass);
    double worst_phase_gradient = 0.0;
    for (std::size_t j = 0; j < fields.s_prime.size(); ++j)
        if (fields.valid[j])
            worst_phase_gradient =
                std::max(worst_phase_gradient, std::abs(fields.s_prime[j]));
    report.real_pointer = worst_phase_gradient <= 1e-8;

    if (report.real_weak_value || report.real_pointer) {
        const Moments m = moments(pointer);
        report.delta_q_per_g = w.a;
        report.delta_p_per_g = 2.0 * w.b * m.var_p;
    }

    if (report.real_weak_value && report.real_pointer)
        report.summary = "real weak value and real pointer: delta_q = g*Re(A_w), delta_p = 0";
    else if (report.real_weak_value)
        report.summary = "real weak value: delta_q = g*Re(A_w), delta_p = 0";
    else if (report.real_pointer)
        report.summary =
            "real pointer: delta_q = g*Re(A_w), delta_p = 2*g*Im(A_w)*Var_p";
    else
        report.summary = "general case: full shift theorem applies";
    return report;
}

} // namespace weaksim
