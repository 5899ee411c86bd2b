#include "dense_dft.hpp"

#include <cmath>
#include <unordered_map>

namespace sfft {

const std::vector<cplx>& roots_of_unity(std::int64_t n) {
  thread_local std::unordered_map<std::int64_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> t(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    // Exact values at the quarter points keep symmetric tables symmetric.
    if (4 * k % n == 0) {
      static const cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      t[static_cast<std::size_t>(k)] = quarter[(4 * k / n) % 4];
    } else {
      const double ang = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
      t[static_cast<std::size_t>(k)] = cplx(std::cos(ang), std::sin(ang));
    }
  }
  return cache.emplace(n, std::move(t)).first->second;
}

void fft_1d(std::span<cplx> a, int sign) {
  const std::size_t len = a.size();
  if (len <= 1) return;
  if (!is_power_of_two(len)) throw ParameterError("transform length must be a power of two");
  for (std::size_t i = 1, j = 0; i < len; ++i) {
    std::size_t bit = len >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& w = roots_of_unity(static_cast<std::int64_t>(len));
  for (std::size_t m = 2; m <= len; m <<= 1) {
    const std::size_t half = m >> 1;
    const std::size_t step = len / m;
    for (std::size_t start = 0; start < len; start += m) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::size_t e = k * step;
        const cplx tw = sign > 0 ? w[e] : (e == 0 ? w[0] : w[len - e]);
        const cplx u = a[start + k];
        const cplx v = a[start + k + half] * tw;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

void fft_nd(std::vector<cplx>& values, std::int64_t side, int d, int sign) {
  const std::size_t n = static_cast<std::size_t>(side);
  const std::size_t total = pow_u64(n, d);
  if (values.size() != total) throw DimensionError("array size does not match side^d");
  if (d == 1) {
    fft_1d(values, sign);
    return;
  }
  std::vector<cplx> line(n);
  std::size_t stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    const std::size_t block = stride * n;
    for (std::size_t outer = 0; outer < total; outer += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer + inner;
        if (stride == 1) {
          fft_1d(std::span<cplx>(values.data() + base, n), sign);
          continue;
        }
        for (std::size_t t = 0; t < n; ++t) line[t] = values[base + t * stride];
        fft_1d(line, sign);
        for (std::size_t t = 0; t < n; ++t) values[base + t * stride] = line[t];
      }
    }
    stride = block;
  }
}

namespace {

DenseSignal transform(const DenseSignal& in, int sign, Domain out_domain) {
  if (in.domain == out_domain) throw DimensionError(out_domain == Domain::frequency ? "forward transform expects a time-domain signal" : "inverse transform expects a frequency-domain signal");
  DenseSignal out(in.grid, out_domain, in.values);
  fft_nd(out.values, in.grid.n, in.grid.d, sign);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.grid.size()));
  for (auto& v : out.values) v *= scale;
  return out;
}

}  // namespace

DenseSignal forward_dft(const DenseSignal& x) { return transform(x, -1, Domain::frequency); }

DenseSignal inverse_dft(const DenseSignal& xhat) { return transform(xhat, +1, Domain::time); }

}  // namespace sfft
