#include <doctest.h>

#include <cmath>

#include "dense_dft.hpp"
#include "location.hpp"

using namespace sfft;

namespace {

struct Instance {
  DenseSignal xhat;
  SparseApprox x;
};

// Tones pairwise at least min_sep apart (circular l_inf), plus gaussian noise carrying
// noise_fraction of the tone energy.
Instance tones(const Grid& g, std::size_t count, std::int64_t min_sep, double noise_fraction, Rng& rng) {
  SparseApprox x(g);
  std::vector<GridIndex> placed;
  while (placed.size() < count) {
    const GridIndex c = g.index(static_cast<std::uint64_t>(rng.uniform_int(0, static_cast<std::int64_t>(g.size()) - 1)));
    bool ok = true;
    for (const GridIndex& p : placed) ok = ok && g.circular_norm_inf(g.sub(c, p)) >= min_sep;
    if (!ok) continue;
    placed.push_back(c);
    x.set(g.flat(c), std::polar(1.0 + rng.uniform(), 2 * kPi * rng.uniform()));
  }
  DenseSignal dense = x.to_dense();
  if (noise_fraction > 0) {
    std::vector<cplx> tail(g.size());
    double e = 0;
    for (auto& v : tail) {
      v = {rng.normal(), rng.normal()};
      e += std::norm(v);
    }
    const double scale = std::sqrt(noise_fraction * x.norm2() * x.norm2() / e);
    for (std::size_t i = 0; i < tail.size(); ++i) dense.values[i] += scale * tail[i];
  }
  return {forward_dft(dense), x};
}

MeasurementSet measure(const DenseSignal& xhat, std::uint64_t B, int r_max, int c_max, std::uint64_t seed) {
  SampleAccess access(xhat);
  Rng rng(seed);
  return acquire_measurements(access, B, 2 * xhat.grid.d, r_max, c_max, 3.0, rng);
}

ProbePair probe(std::int64_t alpha, std::int64_t beta) { return {GridIndex{alpha}, GridIndex{beta}}; }

}  // namespace

TEST_CASE("a noiseless single tone is found by every balanced hashing") {
  // A wrong digit collects the vote of every probe whose beta makes its phase error vanish
  // (even beta when Delta = 2), so only balanced probe sets are guaranteed to decode.
  Rng rng(1);
  for (const auto& [n, d] : {std::pair<std::int64_t, int>{1024, 1}, {64, 2}}) {
    const Grid g(n, d);
    const std::int64_t delta = location_delta(n);
    int balanced = 0, found_anywhere = 0;
    for (int t = 0; t < 10; ++t) {
      const Instance inst = tones(g, 1, 1, 0.0, rng);
      const std::uint64_t i0 = inst.x.entries.begin()->first;
      const MeasurementSet m = measure(inst.xhat, d == 1 ? 16 : 64, 6, 10, 100 + static_cast<std::uint64_t>(t));
      bool any = false;
      for (int r = 0; r < m.r_max; ++r) {
        const LocationResult res = locate_signal(m, r);
        for (const GridIndex& i : res.found) CHECK(g.flat(i) == i0);
        any = any || !res.found.empty();
        bool ok = true;
        for (int s = 0; s < d; ++s) ok = ok && check_balanced(g, m.probes[static_cast<std::size_t>(r)], s, delta);
        if (!ok) continue;
        ++balanced;
        CHECK(res.found.size() == 1);
      }
      found_anywhere += any;
    }
    CHECK(balanced > 0);
    CHECK(found_anywhere == 10);
  }
}

TEST_CASE("digits are decoded group by group") {
  Rng rng(2);
  const Grid g(1 << 12, 1);
  const Instance inst = tones(g, 1, 1, 0.0, rng);
  const GridIndex i0 = g.index(inst.x.entries.begin()->first);
  const MeasurementSet m = measure(inst.xhat, 16, 2, 8, 3);
  const ShiftSchedule& sch = m.shifts;
  for (int r = 0; r < m.r_max; ++r) {
    const Hashing& h = m.hashings[static_cast<std::size_t>(r)];
    const std::uint64_t home = bucket_flat(h, bucket_of(h, i0));
    const std::int64_t target = h.perm.mul(i0)[0];
    std::int64_t below = 1;
    for (int grp = 1; grp <= sch.groups; ++grp) {
      const std::int64_t rad = sch.radix[static_cast<std::size_t>(grp - 1)];
      const auto votes = digit_votes(m, r, home, 0, grp, target % below, {});
      const std::int64_t digit = (target / below) % rad;
      CHECK(votes[static_cast<std::size_t>(digit)] == m.c_max);
      below *= rad;
    }
    CHECK(below == g.n);
  }
}

TEST_CASE("wrong digits stay under the vote on balanced probe sets") {
  Rng rng(4);
  const Grid g(1 << 16, 1);
  const std::int64_t delta = location_delta(g.n);
  REQUIRE(delta == 4);
  int balanced = 0;
  for (int t = 0; t < 30; ++t) {
    const Instance inst = tones(g, 1, 1, 0.0, rng);
    const GridIndex i0 = g.index(inst.x.entries.begin()->first);
    const MeasurementSet m = measure(inst.xhat, 16, 1, 12, 200 + static_cast<std::uint64_t>(t));
    if (!check_balanced(g, m.probes[0], 0, delta)) continue;
    ++balanced;
    const Hashing& h = m.hashings[0];
    const std::int64_t target = h.perm.mul(i0)[0];
    const auto votes = digit_votes(m, 0, bucket_flat(h, bucket_of(h, i0)), 0, 1, 0, {});
    for (std::int64_t digit = 0; digit < delta; ++digit)
      if (digit != target % delta) CHECK(votes[static_cast<std::size_t>(digit)] < std::ceil(0.6 * m.c_max));
  }
  CHECK(balanced > 0);
}

TEST_CASE("separated tones with light noise are mostly located") {
  const Grid g(1024, 1);
  Rng rng(5);
  double located = 0;
  int hashings = 0;
  // ceil(40 loglogN) probes per hashing, the set size at which random probes are balanced
  // with high probability.
  const int probes = static_cast<int>(std::ceil(40 * loglog2(static_cast<double>(g.size()))));
  for (int t = 0; t < 100; ++t) {
    const Instance inst = tones(g, 5, 1024 / 16, 0.01, rng);
    const MeasurementSet m = measure(inst.xhat, 64, 4, probes, 300 + static_cast<std::uint64_t>(t));
    for (int r = 0; r < m.r_max; ++r) {
      const LocationResult res = locate_signal(m, r);
      for (const GridIndex& i : res.found) located += inst.x.entries.count(g.flat(i));
      ++hashings;
    }
  }
  CHECK(located / hashings >= 4.0);
}

TEST_CASE("location is deterministic and an empty residual yields nothing") {
  Rng rng(6);
  const Grid g(256, 1);
  const Instance inst = tones(g, 3, 16, 0.0, rng);
  MeasurementSet m = measure(inst.xhat, 16, 2, 6, 7);
  const LocationResult a = locate_signal(m, 1), b = locate_signal(m, 1);
  CHECK(a.found == b.found);
  CHECK(a.failed == b.failed);
  update_residual_measurements(m, inst.x);
  const LocationResult empty = locate_signal(m, 0);
  CHECK(empty.found.empty());
  CHECK(std::count(empty.failed.begin(), empty.failed.end(), 1) == 16);
  CHECK_THROWS_AS(locate_signal(m, 2), ParameterError);
}

TEST_CASE("balance test") {
  const Grid g(64, 1);
  std::vector<ProbePair> zeros(10, probe(3, 0));
  CHECK_FALSE(check_balanced(g, zeros, 0, 4));
  // Delta = 2: balanced iff at least 49% of beta are odd.
  std::vector<ProbePair> p;
  for (int i = 0; i < 100; ++i) p.push_back(probe(0, i < 49 ? 1 : 2));
  CHECK(check_balanced(g, p, 0, 2));
  p[48] = probe(0, 2);
  CHECK_FALSE(check_balanced(g, p, 0, 2));
  CHECK_THROWS_AS(check_balanced(g, p, 0, 3), ParameterError);
}

TEST_CASE("random probe sets are balanced at the binomial rate") {
  // n = 2^16, Delta = 4, |A| = ceil(40 loglogN) = 160. Balance for r = 1, 3 needs 49% of
  // beta mod 4 in {1, 2, 3}; for r = 2 it needs 49% odd. Compute the exact probability
  // over beta mod 4 and compare with sampled probe sets.
  const Grid g(1 << 16, 1);
  const int size = static_cast<int>(std::ceil(40 * loglog2(static_cast<double>(g.size()))));
  REQUIRE(size == 160);
  const int needed = static_cast<int>(std::ceil(0.49 * size));
  // counts (c0, c1, c2, c3) of beta mod 4 are multinomial(size, 1/4 each).
  std::vector<double> logfact(static_cast<std::size_t>(size) + 1, 0.0);
  for (int i = 1; i <= size; ++i) logfact[static_cast<std::size_t>(i)] = logfact[static_cast<std::size_t>(i - 1)] + std::log(i);
  double exact = 0;
  for (int c0 = 0; c0 <= size; ++c0)
    for (int c2 = 0; c0 + c2 <= size; ++c2) {
      const int odd = size - c0 - c2;
      if (size - c0 < needed || odd < needed) continue;
      // c1 + c3 = odd, summed out: multinomial(c0, c2, odd) with probabilities 1/4, 1/4, 1/2.
      exact += std::exp(logfact[static_cast<std::size_t>(size)] - logfact[static_cast<std::size_t>(c0)] - logfact[static_cast<std::size_t>(c2)] -
                        logfact[static_cast<std::size_t>(odd)] + (c0 + c2) * std::log(0.25) + odd * std::log(0.5));
    }
  Rng rng(8);
  const int trials = 10000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<ProbePair> probes;
    for (int a = 0; a < size; ++a) probes.push_back(probe(rng.uniform_int(0, g.n - 1), rng.uniform_int(0, g.n - 1)));
    hits += check_balanced(g, probes, 0, 4);
  }
  const double rate = static_cast<double>(hits) / trials;
  CHECK(std::abs(rate - exact) <= 4.0 * std::sqrt(exact * (1 - exact) / trials));
  // The 0.49 threshold sits just under the mean 0.5 for r = 2, so this rate is far from
  // 1 - 1/log^4 N at this set size.
  CHECK(exact < 0.7);
}
