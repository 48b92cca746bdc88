#pragma once

#include <complex>
#include <vector>

namespace weaksim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// In-place radix-2 FFT.  Size must be a power of two (the grid type enforces
// this long before we get here).  Twiddle factors come from per-size tables
// built with std::polar at full precision; accumulating them incrementally
// drifts by ~N*eps which is too sloppy for the 1e-12 checks downstream.
//
// Convention: forward is sum_j x_j exp(-2*pi*i*j*n/N) with no scaling,
// inverse carries the 1/N.  fft_inverse(fft_forward(x)) == x to round-off.
void fft_forward(cvec& data);
void fft_inverse(cvec& data);

cvec fft_forward_copy(const cvec& data);
cvec fft_inverse_copy(const cvec& data);

bool is_power_of_two(std::size_t n);

} // namespace weaksim
