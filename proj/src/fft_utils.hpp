#ifndef BMLAB_SRC_FFT_UTILS_HPP
#define BMLAB_SRC_FFT_UTILS_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace bmlab::detail {

/// DFT of a real vector, first half of the spectrum (m/2+1 bins, r2c).
std::vector<std::complex<double>> real_fft_half(const std::vector<double>& in);

/// Unnormalized backward transform of a half spectrum (conjugate symmetry
/// implied): out_k = sum_j V_j e^{+2 pi i jk/m}, out has length m = 2*(half-1).
std::vector<double> halfcomplex_backward(
    const std::vector<std::complex<double>>& half);

}  // namespace bmlab::detail

#endif  // BMLAB_SRC_FFT_UTILS_HPP
