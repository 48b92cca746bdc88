#include "weaksim/fft.hpp"

#include "weaksim/errors.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>
#include <utility>

namespace weaksim {

bool is_power_of_two(std::size_t n) {
    return n > 0 && (n & (n - 1)) == 0;
}

namespace {

// Twiddle table for size n: w[j] = exp(-2*pi*i*j/n), j in [0, n/2).
// Cached per size; the library only ever touches a handful of sizes.
const cvec& twiddles(std::size_t n) {
    thread_local std::unordered_map<std::size_t, cvec> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    cvec w(n / 2);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j)
        w[j] = std::polar(1.0, step * static_cast<double>(j));
    return cache.emplace(n, std::move(w)).first->second;
}

void bit_reverse_permute(cvec& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
}

void transform(cvec& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n))
        throw BadGridSpec("fft: size must be a power of two, got " + std::to_string(n));
    if (n == 1) return;

    bit_reverse_permute(a);
    const cvec& w = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                cplx tw = w[j * stride];
                if (inverse) tw = std::conj(tw);
                const cplx u = a[start + j];
                const cplx v = a[start + j + half] * tw;
                a[start + j] = u + v;
                a[start + j + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= scale;
    }
}

} // namespace

void fft_forward(cvec& data) { transform(data, false); }
void fft_inverse(cvec& data) { transform(data, true); }

cvec fft_forward_copy(const cvec& data) {
    cvec out = data;
    fft_forward(out);
    return out;
}

cvec fft_inverse_copy(const cvec& data) {
    cvec out = data;
    fft_inverse(out);
    return out;
}

} // namespace weaksim
