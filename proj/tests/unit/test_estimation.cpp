#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dense_dft.hpp"
#include "estimation.hpp"
#include "harness.hpp"

using namespace sfft;

namespace {

// Brute-force median: element at sorted position floor(s/2).
double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("median of equal values") { CHECK(coordinatewise_median({{1, 1}, {1, 1}, {1, 1}}) == cplx(1, 1)); }

TEST_CASE("median of reals") {
  CHECK(coordinatewise_median({0.0, 1.0, 100.0}) == cplx(1.0, 0.0));
  CHECK(coordinatewise_median({{5, -1}, {0, 7}, {2, 3}}) == cplx(2, 3));
  CHECK_THROWS_AS(coordinatewise_median({}), ParameterError);
}

TEST_CASE("median error bound holds on random lists") {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int size = static_cast<int>(rng.uniform_int(1, 20));
    std::vector<cplx> xs;
    for (int i = 0; i < size; ++i) xs.push_back({rng.normal() * 3, rng.normal() * 3});
    const cplx a(rng.normal(), rng.normal());
    const cplx y = coordinatewise_median(xs);
    std::vector<double> dist, dist2;
    for (const cplx& x : xs) {
      dist.push_back(std::abs(x - a));
      dist2.push_back(std::norm(x - a));
    }
    CHECK(std::abs(y - a) <= 2.0 * sorted_median(dist) + 1e-12);
    CHECK(std::abs(y - a) <= 2.0 * std::sqrt(sorted_median(dist2)) + 1e-12);
  }
}

TEST_CASE("quantile picks the ceil(gamma s)-th largest") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(quantile(v, 0.2) == 5);
  CHECK(quantile(v, 0.4) == 4);
  CHECK(quantile(v, 0.5) == 3);
  CHECK(quantile(v, 0.99) == 1);
  CHECK(quantile({7.0}, 0.2) == 7);
  CHECK_THROWS_AS(quantile(v, 0.0), ParameterError);
  CHECK_THROWS_AS(quantile(v, 1.0), ParameterError);
  CHECK_THROWS_AS(quantile({}, 0.5), ParameterError);
}

TEST_CASE("estimation bucket count") {
  const Grid g(1024, 1);
  Tuning t;
  // k / (epsilon alpha^2) = 10 / (0.5 * 0.25) = 80 -> 128.
  CHECK(estimation_buckets(g, 10, 0.5, t) == 128);
  t.estimation_buckets = 32;
  CHECK(estimation_buckets(g, 10, 0.5, t) == 32);
  t.estimation_buckets = 48;
  CHECK_THROWS_AS(estimation_buckets(g, 10, 0.5, t), ParameterError);
}

TEST_CASE("a single tone is estimated exactly and thresholded") {
  const Grid g(1024, 1);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const GridIndex i0{rng.uniform_int(0, 1023)};
    const cplx v(rng.normal(), rng.normal());
    SparseApprox x(g);
    x.set(g.flat(i0), v);
    const DenseSignal xhat = forward_dft(x.to_dense());
    SampleAccess access(xhat);
    Rng er(10 + static_cast<std::uint64_t>(t));
    const EstimateBatch batch = estimate_values(access, SparseApprox(g), {i0}, 4, 0.5, 0.0, 5, Tuning{}, er);
    CHECK(std::abs(batch.estimates.at(g.flat(i0)) - v) < 1e-7);
    CHECK(batch.kept.size() == 1);
    CHECK(batch.samples == access.count());
    Rng er2(10 + static_cast<std::uint64_t>(t));
    SampleAccess access2(xhat);
    const EstimateBatch high = estimate_values(access2, SparseApprox(g), {i0}, 4, 0.5, std::abs(v) * 1.01, 5, Tuning{}, er2);
    CHECK(high.kept.empty());
    CHECK(high.estimates.size() == 1);
  }
}

TEST_CASE("samples grow linearly with repetitions") {
  const Grid g(1024, 1);
  SparseApprox x(g);
  x.set(5, 1.0);
  const DenseSignal xhat = forward_dft(x.to_dense());
  std::uint64_t per = 0;
  for (int reps : {1, 3, 9}) {
    SampleAccess access(xhat);
    Rng er(3);
    const EstimateBatch b = estimate_values(access, SparseApprox(g), {GridIndex{5}}, 8, 0.5, 0.0, reps, Tuning{}, er);
    if (reps == 1) per = b.samples;
    CHECK(b.samples == per * static_cast<std::uint64_t>(reps));
  }
}

TEST_CASE("failure probability decays with repetitions on noisy signals") {
  // n = 1024, k = 10 planted heads plus a gaussian tail; failure means
  // |w_i - x_i| > sqrt(epsilon alpha) (nu + mu) with nu = ||x_S||_1 / k.
  const Tuning tuning;
  const double epsilon = 0.5;
  int fails[3] = {0, 0, 0}, total = 0;
  const int reps[3] = {3, 7, 15};
  for (int trial = 0; trial < 500; ++trial) {
    ExperimentSpec spec;
    spec.n = 1024;
    spec.k = 10;
    spec.model = SignalModel::gaussian_tail;
    spec.snr = 3.0;
    const GeneratedSignal sig = generate_signal(spec, 500 + static_cast<std::uint64_t>(trial));
    const double nu = sig.heads.norm1() / 10.0;
    const double bound = std::sqrt(epsilon * tuning.alpha) * (nu + sig.mu_true);
    std::vector<GridIndex> L;
    for (const auto& [f, v] : sig.heads.entries) L.push_back(sig.x.grid.index(f));
    for (int v = 0; v < 3; ++v) {
      SampleAccess access(sig.xhat);
      Rng er(derive_seed(static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(v)));
      // Few buckets so that collisions happen at a measurable rate.
      Tuning small = tuning;
      small.estimation_buckets = 32;
      const EstimateBatch b = estimate_values(access, SparseApprox(sig.x.grid), L, 10, epsilon, 0.0, reps[v], small, er);
      for (const auto& [f, w] : b.estimates) fails[v] += std::abs(w - sig.x.values[f]) > bound;
    }
    total += static_cast<int>(L.size());
  }
  MESSAGE("failure rates at r = 3, 7, 15: ", fails[0] / double(total), ", ", fails[1] / double(total), ", ", fails[2] / double(total));
  CHECK(fails[0] > fails[1]);
  CHECK(fails[1] >= fails[2]);
  CHECK(fails[2] <= 0.01 * total);
}

TEST_CASE("estimation checks its arguments") {
  const Grid g(64, 1);
  DenseSignal xhat(g, Domain::frequency);
  SampleAccess access(xhat);
  Rng rng(4);
  CHECK_THROWS_AS(estimate_values(access, SparseApprox(g), {GridIndex{1}}, 1, 0.5, 0.0, 0, Tuning{}, rng), ParameterError);
  CHECK_THROWS_AS(estimate_values(access, SparseApprox(g), {GridIndex{1}}, 1, 0.0, 0.0, 3, Tuning{}, rng), ParameterError);
}
