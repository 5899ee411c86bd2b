#include "semi_equispaced.hpp"

#include <cmath>

#include "dense_dft.hpp"
#include "filters.hpp"

namespace sfft {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct AxisTaps {
  std::vector<std::size_t> pos;
  std::vector<double> weight;
};

void taps_for(const FlatWindow& w, std::int64_t coord, std::int64_t h, std::int64_t grid2, AxisTaps& out) {
  out.pos.clear();
  out.weight.clear();
  const std::int64_t n = w.n();
  const std::int64_t R = w.radius();
  if (2 * R + 1 >= n) {
    for (std::int64_t m = 0; m < grid2; ++m) {
      const double g = w.time_1d(m * h - coord);
      if (g != 0.0) {
        out.pos.push_back(static_cast<std::size_t>(m));
        out.weight.push_back(g);
      }
    }
    return;
  }
  const std::int64_t lo = -floor_div(-(coord - R), h);
  const std::int64_t hi = floor_div(coord + R, h);
  for (std::int64_t m = lo; m <= hi; ++m) {
    const double g = w.time_1d(m * h - coord);
    if (g != 0.0) {
      out.pos.push_back(static_cast<std::size_t>(mod(m, grid2)));
      out.weight.push_back(g);
    }
  }
}

// y += v * (taps_0 x taps_1 x ...) on the row-major grid of side grid2.
void accumulate(std::vector<cplx>& y, std::size_t grid2, const std::vector<AxisTaps>& taps, int axis, std::size_t base, cplx v) {
  const AxisTaps& t = taps[static_cast<std::size_t>(axis)];
  const bool last = axis + 1 == static_cast<int>(taps.size());
  for (std::size_t k = 0; k < t.pos.size(); ++k) {
    const std::size_t idx = base * grid2 + t.pos[k];
    if (last)
      y[idx] += v * t.weight[k];
    else
      accumulate(y, grid2, taps, axis + 1, idx, v * t.weight[k]);
  }
}

}  // namespace

cplx SpectrumPatch::at(const GridIndex& o) const {
  std::size_t f = 0;
  for (int s = 0; s < d; ++s) {
    if (o[s] < -half || o[s] > half) throw ParameterError("offset outside the evaluated patch");
    f = f * side() + static_cast<std::size_t>(o[s] + half);
  }
  return values[f];
}

SpectrumPatch semi_equispaced_fft(const SparseApprox& x, std::int64_t b, double c) {
  const Grid& g = x.grid;
  const std::int64_t n = g.n;
  const int d = g.d;
  if (!is_power_of_two(static_cast<std::uint64_t>(b)) || b < 2 || 2 * b > n)
    throw ParameterError("semi-equispaced transform needs b a power of two with 2 <= b <= n/2");
  if (!(c >= 1.0)) throw ParameterError("precision c must be >= 1");

  SpectrumPatch patch;
  patch.d = d;
  patch.half = b / 2;
  patch.values.assign(pow_u64(patch.side(), d), cplx(0.0, 0.0));
  if (x.empty()) return patch;

  const auto window = build_flat_window(n, d, b, c);
  const std::int64_t grid2 = 2 * b;
  const std::int64_t h = n / grid2;
  std::vector<cplx> y(pow_u64(static_cast<std::uint64_t>(grid2), d), cplx(0.0, 0.0));
  std::vector<AxisTaps> taps(static_cast<std::size_t>(d));
  for (const auto& [flat, v] : x.entries) {
    const GridIndex l = g.index(flat);
    for (int s = 0; s < d; ++s) taps_for(*window, l[s], h, grid2, taps[static_cast<std::size_t>(s)]);
    accumulate(y, static_cast<std::size_t>(grid2), taps, 0, 0, v);
  }
  fft_nd(y, grid2, d, -1);

  const double scale = std::sqrt(static_cast<double>(g.size())) / std::pow(static_cast<double>(grid2), d);
  const std::size_t side = patch.side();
  for (std::size_t f = 0; f < patch.values.size(); ++f) {
    std::size_t rest = f;
    std::size_t src = 0;
    std::size_t stride = 1;
    for (int s = d - 1; s >= 0; --s) {
      const std::int64_t o = static_cast<std::int64_t>(rest % side) - patch.half;
      rest /= side;
      src += static_cast<std::size_t>(mod(o, grid2)) * stride;
      stride *= static_cast<std::size_t>(grid2);
    }
    patch.values[f] = y[src] * scale;
  }
  return patch;
}

SpectrumPatch shifted_semi_equispaced(const SparseApprox& x, const SpectrumPermutation& perm, std::int64_t b, double c) {
  const Grid& g = x.grid;
  if (perm.grid != g) throw DimensionError("permutation grid does not match signal grid");
  // x*_j = omega^{q^T j} x_{Sigma^{-T} j}, i.e. x_l moves to j = Sigma^T l.
  SparseApprox moved(g);
  for (const auto& [flat, v] : x.entries) {
    const GridIndex j = perm.mul_transpose(g.index(flat));
    moved.add(g.flat(j), v * root(g.n, g.dot(perm.q, j)));
  }
  return semi_equispaced_fft(moved, b, c);
}

}  // namespace sfft
