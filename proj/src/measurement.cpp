#include "weaksim/measurement.hpp"

#include "weaksim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

namespace weaksim {

namespace {

constexpr double kSuccessFloor = 1e-12;
constexpr std::size_t kJointSizeLimit = 1'000'000;

void check_coupling(const CouplingSpec& spec, const PointerState& pointer) {
    const Eigen::Index d = spec.observable.dim();
    if (spec.psi_i.dim() != d || spec.psi_f.dim() != d)
        throw DimMismatch("coupling: observable dim " + std::to_string(d) +
                          ", psi_i dim " + std::to_string(spec.psi_i.dim()) +
                          ", psi_f dim " + std::to_string(spec.psi_f.dim()));
    validate_pointer(pointer);
}

double post_norm_squared(const Grid& grid, const cvec& amplitudes) {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s * grid.spacing();
}

// ---- hand-rolled pieces for the tensor oracle ------------------------------
// The reference path must not share numerics with the production backends,
// so it gets its own eigensolver (cyclic complex Jacobi) and its own O(N^2)
// DFT.  Slow and simple on purpose.

struct DenseHermitian {
    std::size_t d = 0;
    std::vector<cplx> m; // row-major

    cplx& at(std::size_t r, std::size_t c) { return m[r * d + c]; }
    const cplx& at(std::size_t r, std::size_t c) const { return m[r * d + c]; }
};

struct JacobiEigen {
    std::vector<double> values;
    DenseHermitian vectors; // column k is the k-th eigenvector
};

DenseHermitian multiply(const DenseHermitian& a, const DenseHermitian& b) {
    DenseHermitian out{a.d, std::vector<cplx>(a.d * a.d, cplx{})};
    for (std::size_t r = 0; r < a.d; ++r)
        for (std::size_t k = 0; k < a.d; ++k) {
            const cplx ark = a.at(r, k);
            if (ark == cplx{}) continue;
            for (std::size_t c = 0; c < a.d; ++c)
                out.at(r, c) += ark * b.at(k, c);
        }
    return out;
}

DenseHermitian adjoint(const DenseHermitian& a) {
    DenseHermitian out{a.d, std::vector<cplx>(a.d * a.d)};
    for (std::size_t r = 0; r < a.d; ++r)
        for (std::size_t c = 0; c < a.d; ++c)
            out.at(r, c) = std::conj(a.at(c, r));
    return out;
}

JacobiEigen jacobi_hermitian(DenseHermitian a) {
    const std::size_t d = a.d;
    DenseHermitian v{d, std::vector<cplx>(d * d, cplx{})};
    for (std::size_t i = 0; i < d; ++i) v.at(i, i) = 1.0;

    double scale = 0.0;
    for (const auto& x : a.m) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = r + 1; c < d; ++c)
                off = std::max(off, std::abs(a.at(r, c)));
        if (off <= 1e-14 * scale) break;
        if (sweep == 199)
            throw InvariantViolation("jacobi: no convergence after 200 sweeps");

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const cplx apq = a.at(p, q);
                const double gmag = std::abs(apq);
                if (gmag <= 1e-16 * scale) continue;
                const cplx u = apq / gmag;
                const double app = std::real(a.at(p, p));
                const double aqq = std::real(a.at(q, q));
                const double theta = (aqq - app) / (2.0 * gmag);
                // Small root of t^2 - 2 theta t - 1 = 0.
                const double t =
                    (theta >= 0.0 ? -1.0 : 1.0) /
                    (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                DenseHermitian rot{d, std::vector<cplx>(d * d, cplx{})};
                for (std::size_t i = 0; i < d; ++i) rot.at(i, i) = 1.0;
                rot.at(p, p) = c;
                rot.at(p, q) = -s * u;
                rot.at(q, p) = s * std::conj(u);
                rot.at(q, q) = c;

                a = multiply(multiply(adjoint(rot), a), rot);
                v = multiply(v, rot);
            }
        }
    }

    JacobiEigen out;
    out.values.resize(d);
    for (std::size_t i = 0; i < d; ++i) out.values[i] = std::real(a.at(i, i));
    out.vectors = v;

    // Sort eigenpairs ascending.
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return out.values[x] < out.values[y];
    });
    JacobiEigen sorted;
    sorted.values.resize(d);
    sorted.vectors = DenseHermitian{d, std::vector<cplx>(d * d)};
    for (std::size_t k = 0; k < d; ++k) {
        sorted.values[k] = out.values[order[k]];
        for (std::size_t r = 0; r < d; ++r)
            sorted.vectors.at(r, k) = out.vectors.at(r, order[k]);
    }
    return sorted;
}

// Plain O(N^2) DFT, same bin convention as the FFT.
void naive_dft(cvec& x, bool inverse) {
    const std::size_t n = x.size();
    cvec table(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t m = 0; m < n; ++m)
        table[m] = std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                       static_cast<double>(m) /
                                       static_cast<double>(n));
    cvec out(n, cplx{});
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += x[j] * table[(j * k) % n];
        out[k] = acc;
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (auto& c : out) c *= s;
    }
    x = std::move(out);
}

} // namespace

std::vector<Branch> eigen_branches(const CouplingSpec& spec) {
    const auto sd = eigendecompose(spec.observable);
    const Eigen::Index d = sd.eigenvalues.size();
    double scale = 1.0;
    for (Eigen::Index i = 0; i < d; ++i)
        scale = std::max(scale, std::abs(sd.eigenvalues(i)));
    const double gap_tol = 1e-9 * scale;

    std::vector<Branch> branches;
    for (Eigen::Index i = 0; i < d; ++i) {
        const cplx to_i = sd.eigenvectors.col(i).dot(spec.psi_i.amplitudes);
        const cplx to_f = sd.eigenvectors.col(i).dot(spec.psi_f.amplitudes);
        const cplx coeff = std::conj(to_f) * to_i;
        const double weight = std::norm(to_i);
        if (!branches.empty() &&
            sd.eigenvalues(i) - branches.back().eigenvalue <= gap_tol) {
            branches.back().post_coeff += coeff;
            branches.back().weight += weight;
            // Keep the group's representative eigenvalue at the midpoint drift;
            // gaps this small are degeneracy noise, not structure.
        } else {
            branches.push_back(Branch{sd.eigenvalues(i), coeff, weight});
        }
    }
    return branches;
}

PostSelectedPointer couple_postselect_exact(const CouplingSpec& spec,
                                            const PointerState& pointer) {
    check_coupling(spec, pointer);
    const auto branches = eigen_branches(spec);

    cvec alpha(pointer.grid.n_points, cplx{});
    for (const auto& br : branches) {
        if (std::abs(br.post_coeff) == 0.0 && br.weight == 0.0) continue;
        const PointerState shifted =
            translate(pointer, spec.g * br.eigenvalue);
        for (std::size_t j = 0; j < alpha.size(); ++j)
            alpha[j] += br.post_coeff * shifted.amplitudes[j];
    }
    PostSelectedPointer out{pointer.grid, std::move(alpha), 0.0};
    out.success_prob = post_norm_squared(out.grid, out.amplitudes);
    return out;
}

PostSelectedPointer couple_postselect_first_order(const CouplingSpec& spec,
                                                  const PointerState& pointer,
                                                  double overlap_threshold) {
    check_coupling(spec, pointer);
    const cplx overlap = inner_product(spec.psi_f, spec.psi_i);
    const WeakValue w = weak_value(spec.observable, spec.psi_i, spec.psi_f,
                                   overlap_threshold);
    const cplx aw(w.a, w.b);
    const cvec p_phi = apply_momentum(pointer.grid, pointer.amplitudes);

    cvec alpha(pointer.grid.n_points);
    const cplx i_unit(0.0, 1.0);
    for (std::size_t j = 0; j < alpha.size(); ++j)
        alpha[j] = overlap * (pointer.amplitudes[j] -
                              i_unit * spec.g * aw * p_phi[j]);
    PostSelectedPointer out{pointer.grid, std::move(alpha), 0.0};
    out.success_prob = post_norm_squared(out.grid, out.amplitudes);
    return out;
}

PostSelectedPointer couple_postselect_weak_exp(const CouplingSpec& spec,
                                               const PointerState& pointer,
                                               double overlap_threshold) {
    check_coupling(spec, pointer);
    const cplx overlap = inner_product(spec.psi_f, spec.psi_i);
    const WeakValue w = weak_value(spec.observable, spec.psi_i, spec.psi_f,
                                   overlap_threshold);

    const double blowup =
        std::abs(spec.g) * std::abs(w.b) * pointer.grid.k_max();
    if (blowup > 1.0)
        throw AmplificationGuard(
            "weak_exp: g*|Im A_w|*k_max = " + std::to_string(blowup) +
            " exceeds 1; the exponential backend is meaningless here");

    cvec spectrum = to_momentum(pointer);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double k = pointer.grid.momentum(i);
        // exp(-i g (a + ib) k) = exp(g b k) * exp(-i g a k)
        spectrum[i] *= std::exp(spec.g * w.b * k) *
                       std::polar(1.0, -spec.g * w.a * k);
    }
    fft_inverse(spectrum);
    for (auto& c : spectrum) c *= overlap;
    PostSelectedPointer out{pointer.grid, std::move(spectrum), 0.0};
    out.success_prob = post_norm_squared(out.grid, out.amplitudes);
    return out;
}

double success_probability(const PostSelectedPointer& alpha) {
    return post_norm_squared(alpha.grid, alpha.amplitudes);
}

PointerState conditioned_pointer(const PostSelectedPointer& alpha) {
    const double succ = post_norm_squared(alpha.grid, alpha.amplitudes);
    if (succ < kSuccessFloor)
        throw OrthogonalPostSelection(
            "conditioned_pointer: success probability " +
            std::to_string(succ) + " below 1e-12");
    cvec scaled = alpha.amplitudes;
    const double inv = 1.0 / std::sqrt(succ);
    for (auto& c : scaled) c *= inv;
    return pointer_from_samples(alpha.grid, std::move(scaled));
}

Moments unconditional_moments(const CouplingSpec& spec,
                              const PointerState& pointer) {
    check_coupling(spec, pointer);
    const auto branches = eigen_branches(spec);

    double w_total = 0.0;
    double mean_q = 0.0, e_q2 = 0.0, mean_p = 0.0, e_p2 = 0.0;
    for (const auto& br : branches) {
        if (br.weight < 1e-300) continue;
        const PointerState shifted =
            translate(pointer, spec.g * br.eigenvalue);
        const Moments m = moments(shifted);
        w_total += br.weight;
        mean_q += br.weight * m.mean_q;
        e_q2 += br.weight * (m.var_q + m.mean_q * m.mean_q);
        mean_p += br.weight * m.mean_p;
        e_p2 += br.weight * (m.var_p + m.mean_p * m.mean_p);
    }
    if (w_total <= 0.0)
        throw InvariantViolation("unconditional_moments: zero total weight");
    mean_q /= w_total;
    e_q2 /= w_total;
    mean_p /= w_total;
    e_p2 /= w_total;

    Moments out;
    out.mean_q = mean_q;
    out.var_q = e_q2 - mean_q * mean_q;
    out.mean_p = mean_p;
    out.var_p = e_p2 - mean_p * mean_p;
    return out;
}

PostSelectedPointer full_tensor_reference(const CouplingSpec& spec,
                                          const PointerState& pointer) {
    check_coupling(spec, pointer);
    const auto d = static_cast<std::size_t>(spec.observable.dim());
    const std::size_t n = pointer.grid.n_points;
    if (d * n > kJointSizeLimit)
        throw SizeGuard("full_tensor_reference: joint size " +
                        std::to_string(d * n) + " exceeds 1e6");

    DenseHermitian a{d, std::vector<cplx>(d * d)};
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            a.at(r, c) = spec.observable.matrix(static_cast<Eigen::Index>(r),
                                                static_cast<Eigen::Index>(c));
    const JacobiEigen eig = jacobi_hermitian(std::move(a));

    // Joint state Psi[s][j] = psi_i[s] * phi[j].
    std::vector<cvec> joint(d, cvec(n));
    for (std::size_t s = 0; s < d; ++s)
        for (std::size_t j = 0; j < n; ++j)
            joint[s][j] = spec.psi_i.amplitudes(static_cast<Eigen::Index>(s)) *
                          pointer.amplitudes[j];

    // Rotate the system index into the eigenbasis of A.
    std::vector<cvec> eigen_rows(d, cvec(n, cplx{}));
    for (std::size_t e = 0; e < d; ++e)
        for (std::size_t s = 0; s < d; ++s) {
            const cplx coeff = std::conj(eig.vectors.at(s, e));
            if (coeff == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j)
                eigen_rows[e][j] += coeff * joint[s][j];
        }

    // exp(-i g A p) acts branch-diagonally: translate row e by g*lambda_e.
    for (std::size_t e = 0; e < d; ++e) {
        naive_dft(eigen_rows[e], false);
        for (std::size_t i = 0; i < n; ++i)
            eigen_rows[e][i] *= std::polar(
                1.0, -spec.g * eig.values[e] * pointer.grid.momentum(i));
        naive_dft(eigen_rows[e], true);
    }

    // Rotate back, then project onto psi_f.
    for (std::size_t s = 0; s < d; ++s)
        for (std::size_t j = 0; j < n; ++j) joint[s][j] = cplx{};
    for (std::size_t s = 0; s < d; ++s)
        for (std::size_t e = 0; e < d; ++e) {
            const cplx coeff = eig.vectors.at(s, e);
            if (coeff == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j)
                joint[s][j] += coeff * eigen_rows[e][j];
        }

    cvec alpha(n, cplx{});
    for (std::size_t s = 0; s < d; ++s) {
        const cplx bra =
            std::conj(spec.psi_f.amplitudes(static_cast<Eigen::Index>(s)));
        for (std::size_t j = 0; j < n; ++j) alpha[j] += bra * joint[s][j];
    }
    PostSelectedPointer out{pointer.grid, std::move(alpha), 0.0};
    out.success_prob = post_norm_squared(out.grid, out.amplitudes);
    return out;
}

} // namespace weaksim
