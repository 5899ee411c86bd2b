#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dense_dft.hpp"
#include "hashing.hpp"
#include "oracles.hpp"

using namespace sfft;

namespace {

GridIndex random_index(const Grid& g, Rng& rng) {
  GridIndex i(g.d);
  for (int s = 0; s < g.d; ++s) i[s] = rng.uniform_int(0, g.n - 1);
  return i;
}

SparseApprox random_sparse(const Grid& g, std::size_t count, Rng& rng) {
  SparseApprox x(g);
  while (x.size() < count) x.set(g.flat(random_index(g, rng)), {rng.normal(), rng.normal()});
  return x;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("a single tone fills its own bucket") {
  const Grid g(256, 1);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const GridIndex i0 = random_index(g, rng);
    const cplx v(rng.normal(), rng.normal());
    SparseApprox x(g);
    x.set(g.flat(i0), v);
    const DenseSignal xhat = forward_dft(x.to_dense());
    const Hashing h = make_hashing(sample_permutation(g, rng), 16, 4);
    const GridIndex a = random_index(g, rng);
    SampleAccess access(xhat);
    const auto u = hash_to_bins(access, SparseApprox(g), h, a, 3.0);
    const cplx expected = h.filter->time(offset(h, i0, i0)) * v * oracle::unit_root(g.n, g.dot(a, h.perm.mul(i0)));
    const std::uint64_t home = bucket_flat(h, bucket_of(h, i0));
    CHECK(std::abs(u[home] - expected) < 1e-8);
    const GridIndex pi = permute_index(h.perm, i0);
    for (std::int64_t s = 0; s < 16; ++s) {
      if (static_cast<std::uint64_t>(s) == home) continue;
      const double dist = static_cast<double>(g.circular_norm_inf(g.sub(GridIndex{16 * s}, pi)));
      CHECK(std::abs(u[static_cast<std::size_t>(s)]) <= std::pow(2.0 / (1.0 + dist / 16.0), 4) * std::abs(v) + 1e-12);
    }
    // One sample per point of the filter's frequency support.
    CHECK(access.count() == h.filter->support_size());
  }
}

TEST_CASE("subtracting the signal itself empties the buckets") {
  const Grid g(256, 1);
  Rng rng(2);
  const SparseApprox x = random_sparse(g, 6, rng);
  const DenseSignal xhat = forward_dft(x.to_dense());
  const Hashing h = make_hashing(sample_permutation(g, rng), 16, 4);
  CHECK(subtracts_via_semi_equispaced(h));
  SampleAccess access(xhat);
  const auto u = hash_to_bins(access, x, h, random_index(g, rng), 2.0);
  for (const cplx& v : u) CHECK(std::abs(v) <= 1e-6 * x.norm2());
}

TEST_CASE("bucket values match the defining double sum") {
  const Grid g(64, 1);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    DenseSignal x(g, Domain::time);
    for (auto& v : x.values) v = {rng.normal(), rng.normal()};
    const SparseApprox chi = random_sparse(g, 4, rng);
    const Hashing h = make_hashing(sample_permutation(g, rng), 8, 4);
    const GridIndex a = random_index(g, rng);
    const DenseSignal xhat = forward_dft(x);
    SampleAccess access(xhat);
    const auto u = hash_to_bins(access, chi, h, a, 6.0);
    std::vector<cplx> residual = x.values;
    for (const auto& [f, v] : chi.entries) residual[f] -= v;
    CHECK(max_diff(u, oracle::bucket_values(g, residual, h.perm.sigma, h.perm.q, h.b, h.filter->box_half_width(), h.F, a)) < 1e-7);
  }
}

TEST_CASE("direct subtraction path when the window does not fit") {
  // b = n: no room for the semi-equispaced patch.
  const Grid g(16, 1);
  Rng rng(4);
  const Hashing h = make_hashing(sample_permutation(g, rng), 16, 2);
  CHECK_FALSE(subtracts_via_semi_equispaced(h));
  DenseSignal x(g, Domain::time);
  for (auto& v : x.values) v = {rng.normal(), rng.normal()};
  const SparseApprox chi = random_sparse(g, 3, rng);
  const GridIndex a = random_index(g, rng);
  const DenseSignal xhat = forward_dft(x);
  SampleAccess access(xhat);
  const auto u = hash_to_bins(access, chi, h, a, 3.0);
  std::vector<cplx> residual = x.values;
  for (const auto& [f, v] : chi.entries) residual[f] -= v;
  CHECK(max_diff(u, oracle::bucket_values(g, residual, h.perm.sigma, h.perm.q, h.b, h.filter->box_half_width(), h.F, a)) < 1e-10);
}

TEST_CASE("shift schedule") {
  // n = 2^16: Delta = 2^floor(log2(16)/2) = 4.
  CHECK(location_delta(1 << 16) == 4);
  CHECK(location_delta(1024) == 2);
  CHECK(location_delta(4) == 2);
  CHECK_THROWS_AS(location_delta(2), ParameterError);
  const ShiftSchedule s = make_shift_schedule(Grid(1 << 16, 1));
  CHECK(s.groups == 8);
  CHECK(s.shifts.size() == 1 + 8);
  CHECK(s.shifts[0] == GridIndex{0});
  CHECK(s.shifts.back() == GridIndex{1});
  // Mixed radix: 2^17 with Delta = 4 leaves a final radix of 2.
  const ShiftSchedule m = make_shift_schedule(Grid(1 << 17, 1));
  CHECK(m.delta == 4);
  CHECK(m.groups == 9);
  CHECK(m.radix.back() == 2);
  CHECK(m.cumulative.back() == (1 << 17));
  const ShiftSchedule two = make_shift_schedule(Grid(64, 2));
  CHECK(two.groups == 6);
  CHECK(two.shifts.size() == 1 + 2 * 6);
  CHECK(two.shifts[two.index(1, 1)] == GridIndex{0, 32});
}

TEST_CASE("acquisition counts samples exactly") {
  const Grid g(1024, 1);
  Rng rng(5);
  const SparseApprox x = random_sparse(g, 5, rng);
  const DenseSignal xhat = forward_dft(x.to_dense());
  SampleAccess access(xhat);
  Rng mr(6);
  const MeasurementSet m = acquire_measurements(access, 64, 2, 3, 4, 3.0, mr);
  const std::uint64_t W = m.shifts.shifts.size();
  CHECK(W == 1 + 10);
  CHECK(m.buckets.size() == 3 * 4 * W * 64);
  CHECK(m.sample_counter == 3 * 4 * W * m.hashings[0].filter->support_size());
  CHECK(access.count() == m.sample_counter);
  CHECK(m.hashings.size() == 3);
  CHECK(m.probes[0].size() == 4);
}

TEST_CASE("residual updates are additive and match a fresh hashing") {
  const Grid g(64, 2);
  Rng rng(7);
  DenseSignal x(g, Domain::time);
  for (auto& v : x.values) v = {rng.normal(), rng.normal()};
  const DenseSignal xhat = forward_dft(x);
  SampleAccess access(xhat);
  Rng mr(8);
  MeasurementSet m = acquire_measurements(access, 64, 4, 2, 3, 3.0, mr);
  const std::vector<cplx> original = m.buckets;

  update_residual_measurements(m, SparseApprox(g));
  CHECK(m.buckets == original);

  const SparseApprox chi = random_sparse(g, 5, rng);
  SparseApprox neg(g);
  for (const auto& [f, v] : chi.entries) neg.set(f, -v);
  update_residual_measurements(m, chi);
  const std::vector<cplx> updated = m.buckets;
  update_residual_measurements(m, neg);
  CHECK(max_diff(m.buckets, original) < 1e-9);

  for (int r = 0; r < m.r_max; ++r)
    for (int a = 0; a < m.c_max; ++a)
      for (int w = 0; w < static_cast<int>(m.shifts.shifts.size()); w += 3) {
        SampleAccess fresh(xhat);
        const auto u = hash_to_bins(fresh, chi, m.hashings[static_cast<std::size_t>(r)], m.probe_point(r, a, w), 3.0);
        const std::vector<cplx> stored(updated.begin() + static_cast<std::ptrdiff_t>(m.table_offset(r, a, w)),
                                       updated.begin() + static_cast<std::ptrdiff_t>(m.table_offset(r, a, w) + m.B));
        CHECK(max_diff(u, stored) < 1e-9 * std::max(1.0, chi.norm2()));
      }
}

TEST_CASE("measurement dump round trip") {
  const Grid g(256, 1);
  Rng rng(9);
  const SparseApprox x = random_sparse(g, 3, rng);
  const DenseSignal xhat = forward_dft(x.to_dense());
  SampleAccess access(xhat);
  Rng mr(10);
  const MeasurementSet m = acquire_measurements(access, 16, 2, 2, 3, 3.0, mr);
  std::stringstream buf;
  write_measurements(m, buf);
  const MeasurementDump dump = read_measurements(buf);
  CHECK(dump.version == 1);
  CHECK(dump.n == 256);
  CHECK(dump.d == 1);
  CHECK(dump.B == 16);
  CHECK(dump.F == 2);
  CHECK(dump.r_max == 2);
  CHECK(dump.c_max == 3);
  CHECK(dump.seed == m.seed);
  CHECK(dump.shift_count == m.shifts.shifts.size());
  REQUIRE(dump.buckets.size() == m.buckets.size());
  for (std::size_t i = 0; i < m.buckets.size(); ++i) CHECK(std::abs(cplx(dump.buckets[i]) - m.buckets[i]) <= 1e-6 * std::max(1.0, std::abs(m.buckets[i])));

  std::stringstream bad("NOTADUMP");
  CHECK_THROWS_AS(read_measurements(bad), IoError);
  std::string truncated = buf.str().substr(0, 20);
  std::stringstream cut(truncated);
  CHECK_THROWS_AS(read_measurements(cut), IoError);
}

TEST_CASE("acquisition can redraw unbalanced probe sets") {
  const Grid g(1024, 1);
  const DenseSignal xhat(g, Domain::frequency);
  int plain_balanced = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    SampleAccess a1(xhat), a2(xhat);
    Rng r1(seed), r2(seed);
    const MeasurementSet plain = acquire_measurements(a1, 16, 2, 4, 10, 2.0, r1);
    const MeasurementSet redrawn = acquire_measurements(a2, 16, 2, 4, 10, 2.0, r2, 0.49);
    for (const auto& p : plain.probes) plain_balanced += check_balanced(g, p, 0, plain.shifts.delta);
    for (const auto& p : redrawn.probes) CHECK(check_balanced(g, p, 0, redrawn.shifts.delta));
    // Redrawing happens before sampling, so the sample cost is unchanged.
    CHECK(a1.count() == a2.count());
  }
  CHECK(plain_balanced < 120);
}
