#pragma once

#include <memory>

#include "core.hpp"
#include "filters.hpp"
#include "rng.hpp"

namespace sfft {

using Matrix = std::array<std::array<std::int64_t, kMaxDim>, kMaxDim>;

// pi(i) = Sigma (i - q) mod n, Sigma with odd determinant.
struct SpectrumPermutation {
  Grid grid;
  Matrix sigma{};
  Matrix sigma_inv{};
  GridIndex q;

  // Validates that det(sigma) is odd and computes the inverse mod n.
  static SpectrumPermutation from_matrix(const Grid& grid, const Matrix& sigma, const GridIndex& q);
  static SpectrumPermutation identity(const Grid& grid);

  GridIndex mul(const GridIndex& i) const;            // Sigma i
  GridIndex mul_transpose(const GridIndex& i) const;  // Sigma^T i
  GridIndex mul_inverse(const GridIndex& i) const;    // Sigma^{-1} i
  // Same shift rule with Sigma^T in place of Sigma and a new shift.
  SpectrumPermutation transposed(const GridIndex& shift) const;
};

std::int64_t determinant_mod(const Grid& grid, const Matrix& m);

SpectrumPermutation sample_permutation(const Grid& grid, Rng& rng);
GridIndex permute_index(const SpectrumPermutation& perm, const GridIndex& i);
// (P xhat)_i = xhat_{Sigma^T (i - a)} omega^{i^T Sigma q}
DenseSignal apply_P(const SpectrumPermutation& perm, const GridIndex& a, const DenseSignal& xhat);

struct Hashing {
  SpectrumPermutation perm;
  std::int64_t b = 0;
  int F = 0;
  std::shared_ptr<const BucketFilter> filter;

  std::uint64_t B() const { return pow_u64(static_cast<std::uint64_t>(b), perm.grid.d); }
};

Hashing make_hashing(const SpectrumPermutation& perm, std::uint64_t B, int F);

// h(i) = floor(pi(i) b / n + 1/2) mod b per coordinate.
GridIndex bucket_of(const Hashing& h, const GridIndex& i);
// Row-major flat index of a bucket in [b]^d.
std::uint64_t bucket_flat(const Hashing& h, const GridIndex& bucket);
// o_i(j) = pi(j) - (n/b) h(i) mod n
GridIndex offset(const Hashing& h, const GridIndex& i, const GridIndex& j);

}  // namespace sfft
