#include "estimation.hpp"

#include <algorithm>
#include <cmath>

#include "dense_dft.hpp"
#include "permutation.hpp"

namespace sfft {

cplx coordinatewise_median(std::vector<cplx> values) {
  if (values.empty()) throw ParameterError("median of an empty list");
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    re[i] = values[i].real();
    im[i] = values[i].imag();
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(re.begin(), re.begin() + static_cast<std::ptrdiff_t>(mid), re.end());
  std::nth_element(im.begin(), im.begin() + static_cast<std::ptrdiff_t>(mid), im.end());
  return {re[mid], im[mid]};
}

double quantile(std::vector<double> values, double gamma) {
  if (values.empty()) throw ParameterError("quantile of an empty list");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("quantile fraction must be in (0, 1)");
  const auto rank = static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(values.size()) - 1e-12));
  const std::size_t pos = std::max<std::size_t>(rank, 1) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(pos), values.end(), std::greater<>());
  return values[pos];
}

std::uint64_t estimation_buckets(const Grid& grid, std::uint64_t k, double epsilon, const Tuning& tuning) {
  if (tuning.estimation_buckets != 0) {
    bucket_side(grid, tuning.estimation_buckets);
    return tuning.estimation_buckets;
  }
  const double target = static_cast<double>(k) / (epsilon * std::pow(tuning.alpha, 2 * grid.d));
  return pow_u64(static_cast<std::uint64_t>(bucket_side_for(grid, target)), grid.d);
}

EstimateBatch estimate_values(SampleAccess& xhat, const SparseApprox& chi, const std::vector<GridIndex>& L, std::uint64_t k, double epsilon, double nu,
                              int repetitions, const Tuning& tuning, Rng& rng) {
  const Grid& g = xhat.grid();
  if (repetitions < 1) throw ParameterError("estimation needs at least one repetition");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  const std::uint64_t B = estimation_buckets(g, std::max<std::uint64_t>(k, 1), epsilon, tuning);
  const int F = 2 * g.d;
  const std::uint64_t before = xhat.count();

  std::vector<std::vector<cplx>> samples(L.size());
  for (int rep = 0; rep < repetitions; ++rep) {
    Rng rr = rng.child(static_cast<std::uint64_t>(rep));
    const Hashing h = make_hashing(sample_permutation(g, rr), B, F);
    GridIndex z(g.d);
    for (int s = 0; s < g.d; ++s) z[s] = rr.uniform_int(0, g.n - 1);
    const auto u = hash_to_bins(xhat, chi, h, z, tuning.precision_c);
    for (std::size_t t = 0; t < L.size(); ++t) {
      const GridIndex& f = L[t];
      const double gain = h.filter->time(offset(h, f, f));
      const cplx phase = root(g.n, -g.dot(z, h.perm.mul(f)));
      samples[t].push_back(u[bucket_flat(h, bucket_of(h, f))] / gain * phase);
    }
  }

  EstimateBatch out;
  out.kept = SparseApprox(g);
  for (std::size_t t = 0; t < L.size(); ++t) {
    const cplx w = coordinatewise_median(samples[t]);
    const std::uint64_t flat = g.flat(L[t]);
    out.estimates[flat] = w;
    if (std::abs(w) > nu) out.kept.set(flat, w);
  }
  out.samples = xhat.count() - before;
  return out;
}

}  // namespace sfft
