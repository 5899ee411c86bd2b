#pragma once

#include "core.hpp"
#include "permutation.hpp"

namespace sfft {

// Values on the cube of signed offsets [-half, half]^d, row-major.
struct SpectrumPatch {
  int d = 0;
  std::int64_t half = 0;
  std::vector<cplx> values;

  std::size_t side() const { return static_cast<std::size_t>(2 * half + 1); }
  // Offsets are signed integers with |o_s| <= half.
  cplx at(const GridIndex& o) const;
};

// Spectrum of a sparse signal at all ||i||_inf <= b/2, accurate to ||x||_2 N^{-c}.
SpectrumPatch semi_equispaced_fft(const SparseApprox& x, std::int64_t b, double c);

// Spectrum at Sigma (i' - q) for ||i'||_inf <= b/2, indexed by the offset i'.
SpectrumPatch shifted_semi_equispaced(const SparseApprox& x, const SpectrumPermutation& perm, std::int64_t b, double c);

}  // namespace sfft
