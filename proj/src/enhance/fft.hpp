#pragma once

#include <complex>
#include <vector>

namespace uwr::enhance::detail {

using Spectrum = std::vector<std::complex<double>>;

// Unnormalised forward 2D DFT of a real row-major field.
Spectrum fft2(const std::vector<double>& field, int width, int height);

// Inverse 2D DFT (scaled by 1/(width*height)); imaginary part discarded.
std::vector<double> ifft2_real(const Spectrum& spectrum, int width, int height);

// Signed frequency index of bin k in an n-point transform: 0..n/2, then negative.
inline int signed_bin(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace uwr::enhance::detail
