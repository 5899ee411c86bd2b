#include <doctest.h>

#include <cmath>

#include "dense_dft.hpp"
#include "semi_equispaced.hpp"

using namespace sfft;

namespace {

SparseApprox random_sparse(const Grid& g, std::size_t count, Rng& rng) {
  SparseApprox x(g);
  while (x.size() < count) x.set(static_cast<std::uint64_t>(rng.uniform_int(0, static_cast<std::int64_t>(g.size()) - 1)), {rng.normal(), rng.normal()});
  return x;
}

// Largest |patch - dense| over the patch, for the map offset -> spectrum index.
template <class Target>
double patch_error(const SpectrumPatch& patch, const DenseSignal& xhat, Target target) {
  const Grid& g = xhat.grid;
  const std::int64_t side = 2 * patch.half + 1;
  std::uint64_t total = 1;
  for (int s = 0; s < g.d; ++s) total *= static_cast<std::uint64_t>(side);
  double worst = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    GridIndex o(g.d);
    std::uint64_t rest = t;
    for (int s = g.d - 1; s >= 0; --s) {
      o[s] = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(side)) - patch.half;
      rest /= static_cast<std::uint64_t>(side);
    }
    worst = std::max(worst, std::abs(patch.at(o) - xhat.at(target(o))));
  }
  return worst;
}

}  // namespace

TEST_CASE("zero input gives a zero patch") {
  const SpectrumPatch p = semi_equispaced_fft(SparseApprox(Grid(64, 1)), 8, 2.0);
  for (const cplx& v : p.values) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("delta input gives a flat patch") {
  SparseApprox x(Grid(256, 1));
  x.set(0, 1.0);
  const SpectrumPatch p = semi_equispaced_fft(x, 16, 2.0);
  CHECK(p.half >= 8);
  for (std::int64_t o = -8; o <= 8; ++o) CHECK(std::abs(p.at(GridIndex{o}) - 1.0 / 16.0) <= std::pow(256.0, -2.0));
}

TEST_CASE("random sparse input matches the dense spectrum") {
  Rng rng(1);
  const Grid g(256, 1);
  const SparseApprox x = random_sparse(g, 10, rng);
  const DenseSignal xhat = forward_dft(x.to_dense());
  const SpectrumPatch p = semi_equispaced_fft(x, 16, 2.0);
  CHECK(patch_error(p, xhat, [&](const GridIndex& o) { return g.wrap(o); }) <= x.norm2() / std::pow(256.0, 2.0));
}

TEST_CASE("two-dimensional patch") {
  Rng rng(2);
  const Grid g(32, 2);
  const SparseApprox x = random_sparse(g, 12, rng);
  const DenseSignal xhat = forward_dft(x.to_dense());
  const SpectrumPatch p = semi_equispaced_fft(x, 8, 2.0);
  CHECK(patch_error(p, xhat, [&](const GridIndex& o) { return g.wrap(o); }) <= x.norm2() / std::pow(1024.0, 2.0));
}

TEST_CASE("shifted variant with the trivial permutation reduces to the plain one") {
  Rng rng(3);
  const Grid g(128, 1);
  const SparseApprox x = random_sparse(g, 5, rng);
  const SpectrumPatch a = semi_equispaced_fft(x, 16, 2.0);
  const SpectrumPatch b = shifted_semi_equispaced(x, SpectrumPermutation::identity(g), 16, 2.0);
  for (std::int64_t o = -8; o <= 8; ++o) CHECK(std::abs(a.at(GridIndex{o}) - b.at(GridIndex{o})) < 1e-12);
}

TEST_CASE("shifted variant matches the dense spectrum on the permuted patch") {
  Rng rng(4);
  const Grid g(128, 1);
  for (int t = 0; t < 10; ++t) {
    const SparseApprox x = random_sparse(g, 5, rng);
    const SpectrumPermutation perm = sample_permutation(g, rng);
    const DenseSignal xhat = forward_dft(x.to_dense());
    const SpectrumPatch p = shifted_semi_equispaced(x, perm, 16, 2.0);
    const double err = patch_error(p, xhat, [&](const GridIndex& o) { return perm.mul(g.sub(g.wrap(o), perm.q)); });
    CHECK(err <= x.norm2() / std::pow(128.0, 2.0));
  }
}

TEST_CASE("raising c from 2 to 3 shrinks the error by a factor of N") {
  Rng rng(5);
  const Grid g(256, 1);
  const SparseApprox x = random_sparse(g, 8, rng);
  const DenseSignal xhat = forward_dft(x.to_dense());
  auto id = [&](const GridIndex& o) { return g.wrap(o); };
  const double e2 = patch_error(semi_equispaced_fft(x, 16, 2.0), xhat, id);
  const double e3 = patch_error(semi_equispaced_fft(x, 16, 3.0), xhat, id);
  CHECK(e3 <= e2 / 256.0);
  CHECK(e3 <= x.norm2() / std::pow(256.0, 3.0));
}

TEST_CASE("patch lookups outside the evaluated cube are rejected") {
  const SpectrumPatch p = semi_equispaced_fft(SparseApprox(Grid(64, 1)), 8, 2.0);
  CHECK_THROWS_AS(p.at(GridIndex{p.half + 1}), ParameterError);
  CHECK_THROWS_AS(semi_equispaced_fft(SparseApprox(Grid(64, 1)), 64, 2.0), ParameterError);
}
