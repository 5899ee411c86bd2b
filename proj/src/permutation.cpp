#include "permutation.hpp"

#include "dense_dft.hpp"

namespace sfft {

namespace {

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t n) { return mod(mod(a, n) * mod(b, n), n); }

std::int64_t det_rec(const Matrix& m, int size, std::int64_t n) {
  if (size == 1) return mod(m[0][0], n);
  std::int64_t acc = 0;
  for (int col = 0; col < size; ++col) {
    Matrix minor{};
    for (int r = 1; r < size; ++r) {
      int cc = 0;
      for (int c = 0; c < size; ++c) {
        if (c == col) continue;
        minor[r - 1][cc++] = m[r][c];
      }
    }
    const std::int64_t term = mulmod(m[0][col], det_rec(minor, size - 1, n), n);
    acc = mod(col % 2 == 0 ? acc + term : acc - term, n);
  }
  return acc;
}

// Inverse of an odd number mod a power of two n by Newton iteration.
std::int64_t inverse_odd(std::int64_t u, std::int64_t n) {
  std::int64_t x = mod(u, n);
  for (int it = 0; it < 7; ++it) x = mulmod(x, mod(2 - mulmod(u, x, n), n), n);
  return x;
}

GridIndex matvec(const Grid& g, const Matrix& m, const GridIndex& v, bool transpose) {
  g.check_same(v);
  GridIndex r(g.d);
  for (int i = 0; i < g.d; ++i) {
    std::int64_t acc = 0;
    for (int j = 0; j < g.d; ++j) acc = mod(acc + mulmod(transpose ? m[j][i] : m[i][j], v[j], g.n), g.n);
    r[i] = acc;
  }
  return r;
}

}  // namespace

std::int64_t determinant_mod(const Grid& grid, const Matrix& m) { return det_rec(m, grid.d, grid.n); }

SpectrumPermutation SpectrumPermutation::from_matrix(const Grid& grid, const Matrix& sigma, const GridIndex& q) {
  grid.check_same(q);
  const std::int64_t n = grid.n;
  const int d = grid.d;
  const std::int64_t det = determinant_mod(grid, sigma);
  if (det % 2 == 0) throw ParameterError("permutation matrix must have odd determinant");
  const std::int64_t det_inv = inverse_odd(det, n);
  SpectrumPermutation p;
  p.grid = grid;
  p.q = grid.wrap(q);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p.sigma[i][j] = mod(sigma[i][j], n);
  if (d == 1) {
    p.sigma_inv[0][0] = det_inv;
    return p;
  }
  // Adjugate: inv[i][j] = (-1)^{i+j} det(minor without row j, column i) / det.
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Matrix minor{};
      int rr = 0;
      for (int r = 0; r < d; ++r) {
        if (r == j) continue;
        int cc = 0;
        for (int c = 0; c < d; ++c) {
          if (c == i) continue;
          minor[rr][cc++] = p.sigma[r][c];
        }
        ++rr;
      }
      std::int64_t cof = det_rec(minor, d - 1, n);
      if ((i + j) % 2 == 1) cof = mod(-cof, n);
      p.sigma_inv[i][j] = mulmod(cof, det_inv, n);
    }
  }
  return p;
}

SpectrumPermutation SpectrumPermutation::identity(const Grid& grid) {
  Matrix m{};
  for (int s = 0; s < grid.d; ++s) m[s][s] = 1;
  return from_matrix(grid, m, grid.zero());
}

GridIndex SpectrumPermutation::mul(const GridIndex& i) const { return matvec(grid, sigma, i, false); }
GridIndex SpectrumPermutation::mul_transpose(const GridIndex& i) const { return matvec(grid, sigma, i, true); }
GridIndex SpectrumPermutation::mul_inverse(const GridIndex& i) const { return matvec(grid, sigma_inv, i, false); }

SpectrumPermutation SpectrumPermutation::transposed(const GridIndex& shift) const {
  SpectrumPermutation p;
  p.grid = grid;
  p.q = grid.wrap(shift);
  for (int i = 0; i < grid.d; ++i)
    for (int j = 0; j < grid.d; ++j) {
      p.sigma[i][j] = sigma[j][i];
      p.sigma_inv[i][j] = sigma_inv[j][i];
    }
  return p;
}

SpectrumPermutation sample_permutation(const Grid& grid, Rng& rng) {
  Matrix m{};
  for (;;) {
    for (int i = 0; i < grid.d; ++i)
      for (int j = 0; j < grid.d; ++j) m[i][j] = rng.uniform_int(0, grid.n - 1);
    if (determinant_mod(grid, m) % 2 == 1) break;
  }
  GridIndex q(grid.d);
  for (int s = 0; s < grid.d; ++s) q[s] = rng.uniform_int(0, grid.n - 1);
  return SpectrumPermutation::from_matrix(grid, m, q);
}

GridIndex permute_index(const SpectrumPermutation& perm, const GridIndex& i) { return perm.mul(perm.grid.sub(i, perm.q)); }

DenseSignal apply_P(const SpectrumPermutation& perm, const GridIndex& a, const DenseSignal& xhat) {
  const Grid& g = perm.grid;
  if (xhat.grid != g) throw DimensionError("signal grid does not match permutation grid");
  DenseSignal out(g, Domain::frequency);
  const GridIndex sq = perm.mul(perm.q);
  for (std::uint64_t f = 0; f < g.size(); ++f) {
    const GridIndex i = g.index(f);
    const GridIndex src = perm.mul_transpose(g.sub(i, a));
    out.values[f] = xhat.values[g.flat(src)] * root(g.n, g.dot(i, sq));
  }
  return out;
}

Hashing make_hashing(const SpectrumPermutation& perm, std::uint64_t B, int F) {
  Hashing h;
  h.perm = perm;
  h.b = bucket_side(perm.grid, B);
  h.F = F;
  h.filter = build_bucket_filter(perm.grid.n, perm.grid.d, B, F);
  return h;
}

GridIndex bucket_of(const Hashing& h, const GridIndex& i) {
  const Grid& g = h.perm.grid;
  const GridIndex p = permute_index(h.perm, i);
  GridIndex r(g.d);
  for (int s = 0; s < g.d; ++s) r[s] = mod((p[s] * h.b + g.n / 2) / g.n, h.b);
  return r;
}

std::uint64_t bucket_flat(const Hashing& h, const GridIndex& bucket) {
  std::uint64_t f = 0;
  for (int s = 0; s < bucket.d; ++s) f = f * static_cast<std::uint64_t>(h.b) + static_cast<std::uint64_t>(mod(bucket[s], h.b));
  return f;
}

GridIndex offset(const Hashing& h, const GridIndex& i, const GridIndex& j) {
  const Grid& g = h.perm.grid;
  const GridIndex hi = bucket_of(h, i);
  return g.sub(permute_index(h.perm, j), g.scale(hi, g.n / h.b));
}

}  // namespace sfft
