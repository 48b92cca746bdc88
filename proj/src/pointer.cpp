#include "weaksim/pointer.hpp"

#include "weaksim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

namespace weaksim {

namespace {

constexpr double kNormTol = 1e-10;
constexpr double kTailTol = 1e-10;
constexpr double kNodeThresholdRel = 1e-14;

void check_sizes(const Grid& grid, const cvec& amplitudes) {
    if (amplitudes.size() != grid.n_points)
        throw DimMismatch("pointer: " + std::to_string(amplitudes.size()) +
                          " samples on a " + std::to_string(grid.n_points) +
                          "-point grid");
}

double raw_norm_squared(const Grid& grid, const cvec& amplitudes) {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s * grid.spacing();
}

// One Strang step with signed dt (negative dt steps backwards; the
// continuity check needs both directions).
void strang_step(const Grid& grid, cvec& amplitudes, const EvolutionSpec& spec,
                 double dt) {
    const std::size_t n = grid.n_points;
    const bool has_v = !spec.potential.empty();
    cvec half_v;
    if (has_v) {
        half_v.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            half_v[j] = std::polar(1.0, -0.5 * dt * spec.potential[j]);
    }
    cvec kinetic(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = grid.momentum(i);
        kinetic[i] = std::polar(1.0, -dt * k * k / (2.0 * spec.mass));
    }

    if (has_v)
        for (std::size_t j = 0; j < n; ++j) amplitudes[j] *= half_v[j];
    fft_forward(amplitudes);
    for (std::size_t i = 0; i < n; ++i) amplitudes[i] *= kinetic[i];
    fft_inverse(amplitudes);
    if (has_v)
        for (std::size_t j = 0; j < n; ++j) amplitudes[j] *= half_v[j];
}

void check_evolution_spec(const Grid& grid, const EvolutionSpec& spec) {
    if (!(spec.mass > 0.0))
        throw BadScenario("evolution: mass must be positive");
    if (!(spec.dt != 0.0) || !std::isfinite(spec.dt))
        throw BadScenario("evolution: dt must be nonzero");
    if (!spec.potential.empty()) {
        if (spec.potential.size() != grid.n_points)
            throw DimMismatch("evolution: potential has " +
                              std::to_string(spec.potential.size()) +
                              " samples, grid has " +
                              std::to_string(grid.n_points));
        double vmax = 0.0;
        for (double v : spec.potential) vmax = std::max(vmax, std::abs(v));
        if (std::abs(spec.dt) * vmax > 0.1)
            throw StabilityGuard("evolution: |dt| * max|V| = " +
                                 std::to_string(std::abs(spec.dt) * vmax) +
                                 " exceeds 0.1");
    }
}

} // namespace

double norm_squared(const PointerState& state) {
    return raw_norm_squared(state.grid, state.amplitudes);
}

cplx pointer_inner(const PointerState& a, const PointerState& b) {
    if (!(a.grid == b.grid))
        throw DimMismatch("pointer_inner: states live on different grids");
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.amplitudes.size(); ++j)
        s += std::conj(a.amplitudes[j]) * b.amplitudes[j];
    return s * a.grid.spacing();
}

double tail_mass(const PointerState& state) {
    const std::size_t n = state.grid.n_points;
    const std::size_t guard = std::max<std::size_t>(1, n / 40);
    double s = 0.0;
    for (std::size_t j = 0; j < guard; ++j) {
        s += std::norm(state.amplitudes[j]);
        s += std::norm(state.amplitudes[n - 1 - j]);
    }
    return s * state.grid.spacing();
}

void validate_pointer(const PointerState& state) {
    check_sizes(state.grid, state.amplitudes);
    const double n2 = norm_squared(state);
    if (std::abs(n2 - 1.0) > kNormTol)
        throw InvariantViolation("pointer: norm^2 = " + std::to_string(n2) +
                                 " is not 1 within 1e-10");
    const double tail = tail_mass(state);
    if (tail > kTailTol)
        throw TailMass("pointer: " + std::to_string(tail) +
                       " probability mass in the outer 5% of the grid");
}

PointerState make_gaussian(const Grid& grid, double q0, double p0, double sigma,
                           double chirp) {
    if (!(sigma > 0.0))
        throw BadScenario("make_gaussian: sigma must be positive");
    const double half = 0.5 * grid.length;
    const double clearance = half - std::abs(q0);
    if (!(clearance >= 8.0 * sigma))
        throw TailMass("make_gaussian: need 8*sigma = " +
                       std::to_string(8.0 * sigma) +
                       " clearance to the grid edge, have " +
                       std::to_string(clearance));

    PointerState state{grid, cvec(grid.n_points)};
    const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
    for (std::size_t j = 0; j < grid.n_points; ++j) {
        const double q = grid.position(j);
        const double d = q - q0;
        const double mag = std::exp(-d * d * inv4s2);
        state.amplitudes[j] = std::polar(mag, chirp * d * d + p0 * q);
    }
    const double n2 = raw_norm_squared(grid, state.amplitudes);
    if (!(n2 > 0.0)) throw ZeroVector("make_gaussian: state vanished");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : state.amplitudes) a *= scale;
    validate_pointer(state);
    return state;
}

PointerState pointer_from_samples(const Grid& grid, cvec samples) {
    check_sizes(grid, samples);
    const double n2 = raw_norm_squared(grid, samples);
    if (n2 < 1e-28) throw ZeroVector("pointer_from_samples: zero samples");
    // Skip the rescale when already normalized: keeps file round-trips
    // bit-exact instead of perturbing the last ulp.
    if (std::abs(n2 - 1.0) > 1e-12) {
        const double scale = 1.0 / std::sqrt(n2);
        for (auto& a : samples) a *= scale;
    }
    PointerState state{grid, std::move(samples)};
    validate_pointer(state);
    return state;
}

cvec to_momentum(const PointerState& state) {
    return fft_forward_copy(state.amplitudes);
}

cvec apply_momentum(const Grid& grid, const cvec& amplitudes) {
    check_sizes(grid, amplitudes);
    cvec out = fft_forward_copy(amplitudes);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= grid.momentum(i);
    fft_inverse(out);
    return out;
}

cvec spectral_derivative(const Grid& grid, const cvec& amplitudes) {
    check_sizes(grid, amplitudes);
    cvec out = fft_forward_copy(amplitudes);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] *= cplx(0.0, grid.momentum(i));
    fft_inverse(out);
    return out;
}

Moments moments(const PointerState& state) {
    validate_pointer(state);
    const Grid& grid = state.grid;
    const std::size_t n = grid.n_points;

    double w_total = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::norm(state.amplitudes[j]);
        const double q = grid.position(j);
        w_total += w;
        q1 += w * q;
        q2 += w * q * q;
    }
    Moments m;
    m.mean_q = q1 / w_total;
    m.var_q = q2 / w_total - m.mean_q * m.mean_q;

    const cvec spectrum = to_momentum(state);
    double k_total = 0.0, p1 = 0.0, p2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::norm(spectrum[i]);
        const double k = grid.momentum(i);
        k_total += w;
        p1 += w * k;
        p2 += w * k * k;
    }
    m.mean_p = p1 / k_total;
    m.var_p = p2 / k_total - m.mean_p * m.mean_p;

    if (m.var_q * m.var_p < 0.25 - 1e-9)
        throw InvariantViolation("moments: var_q * var_p = " +
                                 std::to_string(m.var_q * m.var_p) +
                                 " breaks the uncertainty bound");
    return m;
}

PolarFields polar_fields(const PointerState& state, double mass) {
    validate_pointer(state);
    if (!(mass > 0.0)) throw BadScenario("polar_fields: mass must be positive");
    const std::size_t n = state.grid.n_points;
    const cvec deriv = spectral_derivative(state.grid, state.amplitudes);

    PolarFields f;
    f.rho.resize(n);
    f.s_prime.assign(n, 0.0);
    f.current.resize(n);
    f.valid.assign(n, 0);

    double rho_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        f.rho[j] = std::norm(state.amplitudes[j]);
        rho_max = std::max(rho_max, f.rho[j]);
    }
    const double threshold = kNodeThresholdRel * rho_max;
    for (std::size_t j = 0; j < n; ++j) {
        const double flux = std::imag(std::conj(state.amplitudes[j]) * deriv[j]);
        f.current[j] = flux / mass;
        if (f.rho[j] >= threshold && f.rho[j] > 0.0) {
            f.s_prime[j] = flux / f.rho[j];
            f.valid[j] = 1;
        }
    }
    return f;
}

double d_var_q_dt(const PointerState& state, double mass) {
    validate_pointer(state);
    if (!(mass > 0.0)) throw BadScenario("d_var_q_dt: mass must be positive");
    const Grid& grid = state.grid;
    const std::size_t n = grid.n_points;

    cvec q_phi(n);
    for (std::size_t j = 0; j < n; ++j)
        q_phi[j] = grid.position(j) * state.amplitudes[j];
    const cvec p_phi = apply_momentum(grid, state.amplitudes);
    const cvec p_q_phi = apply_momentum(grid, q_phi);

    const double dq = grid.spacing();
    cplx sym = 0.0;   // <pq + qp> = <phi|p q phi> + <q phi|p phi>
    cplx mean_p = 0.0;
    double mean_q = 0.0, w_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sym += std::conj(state.amplitudes[j]) * p_q_phi[j] +
               std::conj(q_phi[j]) * p_phi[j];
        mean_p += std::conj(state.amplitudes[j]) * p_phi[j];
        const double w = std::norm(state.amplitudes[j]);
        w_total += w;
        mean_q += w * grid.position(j);
    }
    sym *= dq;
    mean_p *= dq;
    mean_q *= dq;
    const double norm2 = w_total * dq;

    const double corr = std::real(sym) / norm2;
    const double mq = mean_q / norm2;
    const double mp = std::real(mean_p) / norm2;
    return (corr - 2.0 * mq * mp) / mass;
}

PointerState translate(const PointerState& state, double s) {
    cvec spectrum = fft_forward_copy(state.amplitudes);
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        spectrum[i] *= std::polar(1.0, -state.grid.momentum(i) * s);
    fft_inverse(spectrum);
    PointerState out{state.grid, std::move(spectrum)};
    validate_pointer(out);
    return out;
}

PointerState evolve_free(const PointerState& state, const EvolutionSpec& spec,
                         std::size_t steps) {
    validate_pointer(state);
    check_evolution_spec(state.grid, spec);
    PointerState out = state;
    for (std::size_t s = 0; s < steps; ++s)
        strang_step(out.grid, out.amplitudes, spec, spec.dt);
    validate_pointer(out);
    return out;
}

double continuity_residual(const PointerState& state, const EvolutionSpec& spec) {
    validate_pointer(state);
    check_evolution_spec(state.grid, spec);
    const std::size_t n = state.grid.n_points;

    cvec fwd = state.amplitudes;
    cvec bwd = state.amplitudes;
    strang_step(state.grid, fwd, spec, spec.dt);
    strang_step(state.grid, bwd, spec, -spec.dt);

    const cvec deriv = spectral_derivative(state.grid, state.amplitudes);
    cvec current(n);
    for (std::size_t j = 0; j < n; ++j)
        current[j] = std::imag(std::conj(state.amplitudes[j]) * deriv[j]) /
                     spec.mass;
    const cvec div_j = spectral_derivative(state.grid, current);

    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double rho_t =
            (std::norm(fwd[j]) - std::norm(bwd[j])) / (2.0 * spec.dt);
        worst = std::max(worst, std::abs(rho_t + std::real(div_j[j])));
    }
    return worst;
}

void save_pointer(const PointerState& state, std::ostream& out) {
    char line[128];
    for (std::size_t j = 0; j < state.grid.n_points; ++j) {
        std::snprintf(line, sizeof line, "%.17g %.17g %.17g\n",
                      state.grid.position(j), state.amplitudes[j].real(),
                      state.amplitudes[j].imag());
        out << line;
    }
    if (!out) throw IoError("save_pointer: write failed");
}

void save_pointer(const PointerState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_pointer: cannot open " + path);
    save_pointer(state, out);
}

PointerState load_pointer(const Grid& grid, std::istream& in) {
    cvec samples;
    samples.reserve(grid.n_points);
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        std::vector<double> cols;
        double v;
        while (row >> v) cols.push_back(v);
        if (cols.size() == 3)
            samples.emplace_back(cols[1], cols[2]);
        else if (cols.size() == 2)
            samples.emplace_back(cols[0], cols[1]);
        else
            throw IoError("load_pointer: expected 2 or 3 columns, got " +
                          std::to_string(cols.size()));
    }
    if (samples.size() != grid.n_points)
        throw IoError("load_pointer: file has " + std::to_string(samples.size()) +
                      " rows, grid needs " + std::to_string(grid.n_points));
    return pointer_from_samples(grid, std::move(samples));
}

PointerState load_pointer(const Grid& grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_pointer: cannot open " + path);
    return load_pointer(grid, in);
}

} // namespace weaksim
