#include "hashing.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include "dense_dft.hpp"
#include "semi_equispaced.hpp"

namespace sfft {

namespace {

// Offsets of the support point with flat number t (row-major over the 1-D support list).
void decode(std::size_t t, std::size_t len, int d, std::array<std::size_t, kMaxDim>& idx) {
  for (int s = d - 1; s >= 0; --s) {
    idx[static_cast<std::size_t>(s)] = t % len;
    t /= len;
  }
}

std::int64_t chi_patch_side(const Hashing& h) {
  const std::int64_t half = h.filter->freq_half_width();
  const std::int64_t bp = static_cast<std::int64_t>(ceil_power_of_two(static_cast<std::uint64_t>(std::max<std::int64_t>(2, 2 * half))));
  return 2 * half + 1 <= h.perm.grid.n && 2 * bp <= h.perm.grid.n ? bp : 0;
}

std::vector<cplx> chi_on_support(const SparseApprox& chi, const Hashing& h, const GridIndex& a, double c) {
  const Grid& g = h.perm.grid;
  const auto& f1 = h.filter->freq_1d();
  const std::size_t len = f1.size();
  const int d = g.d;
  const std::size_t total = pow_u64(len, d);
  std::vector<cplx> out(total, cplx(0.0, 0.0));
  std::array<std::size_t, kMaxDim> idx{};

  const std::int64_t bp = chi_patch_side(h);
  if (bp > 0) {
    // Values at Sigma^T (i - a) for all |i| <= bp/2.
    const SpectrumPatch patch = shifted_semi_equispaced(chi, h.perm.transposed(a), bp, c);
    GridIndex o(d);
    for (std::size_t t = 0; t < total; ++t) {
      decode(t, len, d, idx);
      for (int s = 0; s < d; ++s) o[s] = f1[idx[static_cast<std::size_t>(s)]].first;
      out[t] = patch.at(o);
    }
    return out;
  }

  // Direct: chihat at Sigma^T (i - a) = N^{-1/2} sum_l chi_l omega^{a^T v - i^T v}, v = Sigma l.
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(g.size()));
  std::vector<std::vector<cplx>> axis(static_cast<std::size_t>(d), std::vector<cplx>(len));
  for (const auto& [flat, val] : chi.entries) {
    const GridIndex v = h.perm.mul(g.index(flat));
    const cplx base = val * root(g.n, g.dot(a, v)) * inv_sqrt_n;
    for (int s = 0; s < d; ++s)
      for (std::size_t m = 0; m < len; ++m) axis[static_cast<std::size_t>(s)][m] = root(g.n, -f1[m].first * v[s]);
    for (std::size_t t = 0; t < total; ++t) {
      decode(t, len, d, idx);
      cplx p = base;
      for (int s = 0; s < d; ++s) p *= axis[static_cast<std::size_t>(s)][idx[static_cast<std::size_t>(s)]];
      out[t] += p;
    }
  }
  return out;
}

}  // namespace

bool subtracts_via_semi_equispaced(const Hashing& h) { return chi_patch_side(h) > 0; }

std::vector<cplx> hash_to_bins(SampleAccess& xhat, const SparseApprox& chi, const Hashing& h, const GridIndex& a, double c) {
  const Grid& g = h.perm.grid;
  if (xhat.grid() != g) throw DimensionError("signal grid does not match hashing grid");
  if (!chi.empty() && chi.grid != g) throw DimensionError("chi grid does not match hashing grid");
  g.check_same(a);
  const int d = g.d;
  const std::int64_t n = g.n;
  const std::int64_t b = h.b;
  const auto& f1 = h.filter->freq_1d();
  const std::size_t len = f1.size();
  const std::size_t total = pow_u64(len, d);

  std::vector<cplx> chi_hat;
  if (!chi.empty()) chi_hat = chi_on_support(chi, h, a, c);

  const GridIndex sq = h.perm.mul(h.perm.q);
  const std::vector<cplx>& roots = roots_of_unity(n);
  // n and b are powers of two, so residues are bit masks (also for negative values).
  const std::int64_t nmask = n - 1;
  const std::int64_t bmask = b - 1;
  std::vector<cplx> z(h.B(), cplx(0.0, 0.0));
  std::array<std::size_t, kMaxDim> idx{};
  std::array<std::int64_t, kMaxDim> k{};
  for (std::size_t t = 0; t < total; ++t) {
    decode(t, len, d, idx);
    double gval = 1.0;
    std::int64_t phase = 0;
    std::uint64_t bucket = 0;
    k.fill(0);
    for (int s = 0; s < d; ++s) {
      const auto& [off, val] = f1[idx[static_cast<std::size_t>(s)]];
      gval *= val;
      phase += off * sq[s];
      bucket = bucket * static_cast<std::uint64_t>(b) + static_cast<std::uint64_t>(off & bmask);
      const std::int64_t delta = (off - a[s]) & nmask;
      for (int u = 0; u < d; ++u) k[static_cast<std::size_t>(u)] += h.perm.sigma[s][u] * delta;
    }
    std::uint64_t flat = 0;
    for (int u = 0; u < d; ++u) flat = flat * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k[static_cast<std::size_t>(u)] & nmask);
    cplx v = xhat(flat);
    if (!chi_hat.empty()) v -= chi_hat[t];
    z[bucket] += gval * v * roots[static_cast<std::size_t>(phase & nmask)];
  }
  fft_nd(z, b, d, +1);
  return z;
}

std::int64_t location_delta(std::int64_t n) {
  const int L = log2_exact(static_cast<std::uint64_t>(n));
  const int e = (std::bit_width(static_cast<unsigned>(L)) - 1) / 2;
  std::int64_t delta = std::int64_t{1} << e;
  if (delta < 2) delta = 2;
  if (delta >= n) throw ParameterError("n too small for digit location: Delta >= n");
  return delta;
}

ShiftSchedule make_shift_schedule(const Grid& grid) {
  ShiftSchedule sch;
  sch.delta = location_delta(grid.n);
  const int L = grid.log2n();
  const int e = log2_exact(static_cast<std::uint64_t>(sch.delta));
  sch.groups = (L + e - 1) / e;
  std::int64_t P = 1;
  for (int g = 1; g <= sch.groups; ++g) {
    const std::int64_t rad = g < sch.groups ? sch.delta : grid.n / P;
    P *= rad;
    sch.radix.push_back(rad);
    sch.cumulative.push_back(P);
  }
  sch.shifts.push_back(grid.zero());
  for (int s = 0; s < grid.d; ++s)
    for (int g = 1; g <= sch.groups; ++g) sch.shifts.push_back(grid.scale(grid.unit(s), grid.n / sch.cumulative[static_cast<std::size_t>(g - 1)]));
  return sch;
}

GridIndex MeasurementSet::probe_point(int r, int a, int w) const {
  const ProbePair& p = probes[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)];
  ProbePair one_w{GridIndex(grid.d), shifts.shifts[static_cast<std::size_t>(w)]};
  for (int s = 0; s < grid.d; ++s) one_w.alpha[s] = 1;
  return star(grid, p, one_w);
}

bool check_balanced(const Grid& grid, const std::vector<ProbePair>& probes, int s, std::int64_t delta, double fraction) {
  if (!is_power_of_two(static_cast<std::uint64_t>(delta)) || delta < 2 || delta >= grid.n) throw ParameterError("Delta must be a power of two in [2, n)");
  if (probes.empty()) return false;
  const int needed = static_cast<int>(std::ceil(fraction * static_cast<double>(probes.size()) - 1e-9));
  for (std::int64_t r = 1; r < delta; ++r) {
    int left = 0;
    for (const auto& p : probes) {
      // omega_Delta^m has Re <= 0 iff m / Delta lies in [1/4, 3/4].
      const std::int64_t e = mod(r * mod(p.beta[s], delta), delta);
      if (4 * e >= delta && 4 * e <= 3 * delta) ++left;
    }
    if (left < needed) return false;
  }
  return true;
}

MeasurementSet acquire_measurements(SampleAccess& xhat, std::uint64_t B, int F, int r_max, int c_max, double c, Rng& rng, double balance_fraction) {
  const Grid& g = xhat.grid();
  MeasurementSet m;
  m.grid = g;
  m.b = bucket_side(g, B);
  m.B = B;
  m.F = F;
  m.r_max = r_max;
  m.c_max = c_max;
  m.c = c;
  m.seed = rng.seed();
  m.shifts = make_shift_schedule(g);
  const std::uint64_t before = xhat.count();
  const int W = static_cast<int>(m.shifts.shifts.size());
  m.buckets.assign(static_cast<std::size_t>(r_max) * static_cast<std::size_t>(c_max) * static_cast<std::size_t>(W) * B, cplx(0.0, 0.0));
  const SparseApprox none(g);
  for (int r = 0; r < r_max; ++r) {
    Rng hr = rng.child(static_cast<std::uint64_t>(r));
    m.hashings.push_back(make_hashing(sample_permutation(g, hr), B, F));
    std::vector<ProbePair> probes;
    for (int attempt = 0; attempt < 64; ++attempt) {
      probes.clear();
      for (int a = 0; a < c_max; ++a) {
        ProbePair p{GridIndex(g.d), GridIndex(g.d)};
        for (int s = 0; s < g.d; ++s) p.alpha[s] = hr.uniform_int(0, g.n - 1);
        for (int s = 0; s < g.d; ++s) p.beta[s] = hr.uniform_int(0, g.n - 1);
        probes.push_back(p);
      }
      if (balance_fraction <= 0) break;
      bool balanced = true;
      for (int s = 0; s < g.d && balanced; ++s) balanced = check_balanced(g, probes, s, m.shifts.delta, balance_fraction);
      if (balanced) break;
    }
    m.probes.push_back(std::move(probes));
  }
  for (int r = 0; r < r_max; ++r)
    for (int a = 0; a < c_max; ++a)
      for (int w = 0; w < W; ++w) {
        const auto u = hash_to_bins(xhat, none, m.hashings[static_cast<std::size_t>(r)], m.probe_point(r, a, w), c);
        std::copy(u.begin(), u.end(), m.table(r, a, w));
      }
  m.sample_counter = xhat.count() - before;
  return m;
}

MeasurementSet acquire_measurements(SampleAccess& xhat, const RecoveryParams& params, Rng& rng) {
  validate_params(xhat.grid(), params);
  return acquire_measurements(xhat, params.B, params.F, params.r_max, params.c_max, params.tuning.precision_c, rng,
                              params.tuning.redraw_unbalanced_probes ? params.tuning.balance_fraction : 0.0);
}

void update_residual_measurements(MeasurementSet& m, const SparseApprox& chi_delta) {
  if (chi_delta.empty()) return;
  const Grid& g = m.grid;
  if (chi_delta.grid != g) throw DimensionError("chi grid does not match measurement grid");
  const int d = g.d;
  const std::int64_t b = m.b;
  const std::int64_t step = g.n / b;
  const int W = static_cast<int>(m.shifts.shifts.size());
  std::vector<double> profile(m.B);
  std::vector<std::vector<double>> axis(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(b)));
  for (int r = 0; r < m.r_max; ++r) {
    const Hashing& h = m.hashings[static_cast<std::size_t>(r)];
    std::vector<GridIndex> points;
    for (int a = 0; a < m.c_max; ++a)
      for (int w = 0; w < W; ++w) points.push_back(m.probe_point(r, a, w));
    for (const auto& [flat, val] : chi_delta.entries) {
      const GridIndex l = g.index(flat);
      const GridIndex p = permute_index(h.perm, l);
      for (int s = 0; s < d; ++s)
        for (std::int64_t t = 0; t < b; ++t) axis[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] = h.filter->time_1d(step * t - p[s]);
      // profile = axis_0 x axis_1 x ... (row-major over [b]^d)
      profile[0] = 1.0;
      std::size_t filled = 1;
      for (int s = 0; s < d; ++s) {
        const auto& ax = axis[static_cast<std::size_t>(s)];
        for (std::size_t f = filled; f-- > 0;)
          for (std::size_t t = static_cast<std::size_t>(b); t-- > 0;) profile[f * static_cast<std::size_t>(b) + t] = profile[f] * ax[t];
        filled *= static_cast<std::size_t>(b);
      }
      const GridIndex sl = h.perm.mul(l);
      std::size_t pi = 0;
      for (int a = 0; a < m.c_max; ++a)
        for (int w = 0; w < W; ++w, ++pi) {
          const cplx coef = val * root(g.n, g.dot(points[pi], sl));
          cplx* tab = m.table(r, a, w);
          for (std::uint64_t j = 0; j < m.B; ++j) tab[j] -= coef * profile[j];
        }
    }
  }
}

namespace {

template <class T>
void put(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated measurement dump");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

constexpr char kMagic[8] = {'S', 'F', 'F', 'T', 'M', 'S', 'E', 'T'};

}  // namespace

void write_measurements(const MeasurementSet& m, std::ostream& out) {
  out.write(kMagic, 8);
  put<std::uint32_t>(out, 1);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.grid.n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.grid.d));
  put<std::uint64_t>(out, m.B);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.F));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.r_max));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.c_max));
  put<std::uint64_t>(out, m.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.shifts.shifts.size()));
  for (const cplx& v : m.buckets) {
    put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
    put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
  }
  if (!out) throw IoError("failed to write measurement dump");
}

MeasurementDump read_measurements(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kMagic)) throw IoError("not a measurement dump");
  MeasurementDump dump;
  dump.version = get<std::uint32_t>(in);
  if (dump.version != 1) throw IoError("unsupported measurement dump version " + std::to_string(dump.version));
  dump.n = get<std::uint64_t>(in);
  dump.d = get<std::uint32_t>(in);
  dump.B = get<std::uint64_t>(in);
  dump.F = get<std::uint32_t>(in);
  dump.r_max = get<std::uint32_t>(in);
  dump.c_max = get<std::uint32_t>(in);
  dump.seed = get<std::uint64_t>(in);
  dump.shift_count = get<std::uint32_t>(in);
  const std::uint64_t count = static_cast<std::uint64_t>(dump.r_max) * dump.c_max * dump.shift_count * dump.B;
  dump.buckets.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float re = std::bit_cast<float>(get<std::uint32_t>(in));
    const float im = std::bit_cast<float>(get<std::uint32_t>(in));
    dump.buckets.emplace_back(re, im);
  }
  return dump;
}

}  // namespace sfft
