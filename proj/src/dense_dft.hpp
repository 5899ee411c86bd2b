#pragma once

#include <span>
#include <vector>

#include "core.hpp"

namespace sfft {

// Table of e^{2 pi i k / n}, k in [0, n). Cached per thread.
const std::vector<cplx>& roots_of_unity(std::int64_t n);

// omega_n^e for any integer exponent e.
inline cplx root(std::int64_t n, std::int64_t e) { return roots_of_unity(n)[static_cast<std::size_t>(mod(e, n))]; }

// Unnormalized in-place transform: a_j <- sum_i a_i exp(sign * 2 pi i ij / len).
void fft_1d(std::span<cplx> a, int sign);

// Unnormalized row-major transform over [side]^d.
void fft_nd(std::vector<cplx>& values, std::int64_t side, int d, int sign);

// Orthonormal transforms: xhat_j = N^{-1/2} sum_i omega^{-i.j} x_i and back.
DenseSignal forward_dft(const DenseSignal& x);
DenseSignal inverse_dft(const DenseSignal& xhat);

}  // namespace sfft
