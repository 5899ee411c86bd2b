#include "diagnostics.hpp"

#include <cmath>

#include "dense_dft.hpp"
#include "estimation.hpp"
#include "location.hpp"

namespace sfft {

namespace {

constexpr double kQuantFraction = 0.2;

GridIndex probe_point(const Grid& g, const ProbePair& p, const GridIndex& w) {
  GridIndex out(g.d);
  for (int s = 0; s < g.d; ++s) out[s] = mod(p.alpha[s] + mod(p.beta[s] * w[s], g.n), g.n);
  return out;
}

struct TailTerm {
  cplx weighted;       // G_{o_i(j)} x_j
  GridIndex sigma_j;   // Sigma j
};

}  // namespace

bool HashingNoise::isolated() const {
  for (bool v : isolated_at)
    if (!v) return false;
  return true;
}

double NoiseProfile::e_head_total() const {
  double s = 0;
  for (const auto& [f, e] : elements) s += e.e_head;
  return s;
}

double NoiseProfile::e_tail_total() const {
  double s = 0;
  for (const auto& [f, e] : elements) s += e.e_tail;
  return s;
}

double tail_noise(const DenseSignal& x, const std::vector<bool>& in_S, const Hashing& h, const GridIndex& i, const GridIndex& z) {
  const Grid& g = x.grid;
  const double gain = h.filter->time(offset(h, i, i));
  const GridIndex si = h.perm.mul(i);
  cplx sum(0.0, 0.0);
  for (std::uint64_t f = 0; f < x.values.size(); ++f) {
    if (in_S[f] || x.values[f] == cplx(0.0, 0.0)) continue;
    const GridIndex j = g.index(f);
    const GridIndex sj = h.perm.mul(j);
    sum += h.filter->time(offset(h, i, j)) * x.values[f] * root(g.n, g.dot(z, g.sub(sj, si)));
  }
  return std::abs(sum) / gain;
}

std::vector<bool> isolation_by_scale(const Hashing& h, const std::vector<GridIndex>& S, const GridIndex& i, double alpha) {
  const Grid& g = h.perm.grid;
  const std::int64_t step = g.n / h.b;
  const GridIndex center = g.scale(bucket_of(h, i), step);
  const int scales = log2_exact(static_cast<std::uint64_t>(h.b)) + 1;
  std::vector<std::int64_t> dist;
  for (const GridIndex& j : S) {
    if (j == i) continue;
    dist.push_back(g.circular_norm_inf(g.sub(permute_index(h.perm, j), center)));
  }
  std::vector<bool> out;
  for (int t = 0; t < scales; ++t) {
    const std::int64_t radius = step << t;
    std::int64_t count = 0;
    for (std::int64_t v : dist)
      if (v <= radius) ++count;
    const double bound = std::pow(2.0 * kPi, -static_cast<double>(g.d * h.F)) * std::pow(alpha, g.d / 2.0) * std::ldexp(1.0, (t + 1) * g.d + t);
    out.push_back(static_cast<double>(count) <= bound);
  }
  return out;
}

NoiseProfile compute_noise_profile(const DenseSignal& x, const SparseApprox& chi, const std::vector<GridIndex>& S, const std::vector<Hashing>& hashings,
                                   const std::vector<std::vector<ProbePair>>& probes, const ShiftSchedule& shifts, const DiagnosticsOptions& opt) {
  const Grid& g = x.grid;
  if (x.domain != Domain::time) throw DimensionError("noise profile needs the time-domain signal");
  if (!chi.empty() && chi.grid != g) throw DimensionError("chi grid does not match signal grid");
  if (probes.size() != hashings.size()) throw ParameterError("one probe set per hashing is required");
  const std::size_t W = shifts.shifts.size();
  std::size_t max_probes = 1;
  for (const auto& p : probes) max_probes = std::max(max_probes, p.size());
  const double cost = static_cast<double>(g.size()) * static_cast<double>(S.size()) * static_cast<double>(hashings.size()) *
                      (static_cast<double>(max_probes * W) + 1.0);
  if (cost > opt.budget) throw ScaleError("noise profile too expensive: " + std::to_string(cost) + " > budget " + std::to_string(opt.budget));

  std::vector<bool> in_S(g.size(), false);
  for (const GridIndex& i : S) in_S[g.flat(i)] = true;

  // y = (x - chi)_S - chi_{not S}
  std::map<std::uint64_t, cplx> y;
  for (const GridIndex& i : S) {
    const std::uint64_t f = g.flat(i);
    const cplx v = x.values[f] - chi.get(f);
    if (v != cplx(0.0, 0.0)) y[f] = v;
  }
  for (const auto& [f, v] : chi.entries)
    if (!in_S[f]) y[f] = -v;

  NoiseProfile prof;
  for (const GridIndex& i : S) {
    const std::uint64_t fi = g.flat(i);
    ElementNoise el;
    el.residual = x.values[fi] - chi.get(fi);
    std::vector<double> heads, tails;
    for (std::size_t r = 0; r < hashings.size(); ++r) {
      const Hashing& h = hashings[r];
      HashingNoise hn;
      hn.gain = h.filter->time(offset(h, i, i));
      double head = 0;
      for (const auto& [fj, v] : y) {
        if (fj == fi) continue;
        head += h.filter->time(offset(h, i, g.index(fj))) * std::abs(v);
      }
      hn.e_head = head / hn.gain;

      std::vector<TailTerm> terms;
      double mu2 = 0;
      for (std::uint64_t fj = 0; fj < g.size(); ++fj) {
        if (in_S[fj] || fj == fi || x.values[fj] == cplx(0.0, 0.0)) continue;
        const GridIndex j = g.index(fj);
        const double gj = h.filter->time(offset(h, i, j));
        mu2 += std::norm(x.values[fj]) * gj * gj;
        terms.push_back({gj * x.values[fj], h.perm.mul(j)});
      }
      hn.mu2 = mu2 / std::abs(hn.gain);
      const double mu = std::sqrt(hn.mu2);

      const GridIndex si = h.perm.mul(i);
      hn.e_tail = 40.0 * mu;
      for (std::size_t w = 0; w < W; ++w) {
        std::vector<double> per_probe;
        for (const ProbePair& p : probes[r]) {
          const GridIndex z = probe_point(g, p, shifts.shifts[w]);
          cplx sum(0.0, 0.0);
          for (const TailTerm& t : terms) sum += t.weighted * root(g.n, g.dot(z, g.sub(t.sigma_j, si)));
          per_probe.push_back(std::abs(sum) / hn.gain);
        }
        const double q = per_probe.empty() ? 0.0 : quantile(per_probe, kQuantFraction);
        hn.e_tail_shift.push_back(q);
        hn.e_tail += positive_part(q - 40.0 * mu);
      }
      hn.isolated_at = isolation_by_scale(h, S, i, opt.alpha);
      heads.push_back(hn.e_head);
      tails.push_back(hn.e_tail);
      el.per_hashing.push_back(std::move(hn));
    }
    if (!heads.empty()) {
      el.e_head = quantile(heads, kQuantFraction);
      el.e_tail = quantile(tails, kQuantFraction);
    }
    prof.elements[fi] = std::move(el);
  }
  return prof;
}

NoiseProfile compute_noise_profile(const DenseSignal& x, const SparseApprox& chi, const std::vector<GridIndex>& S, const MeasurementSet& mset,
                                   const DiagnosticsOptions& opt) {
  return compute_noise_profile(x, chi, S, mset.hashings, mset.probes, mset.shifts, opt);
}

bool certifies_location(const NoiseProfile& profile, const Grid& grid, std::uint64_t i_flat, int r, const std::vector<ProbePair>& probes,
                        std::int64_t delta, double balance_fraction) {
  const auto it = profile.elements.find(i_flat);
  if (it == profile.elements.end()) return false;
  const ElementNoise& el = it->second;
  if (r < 0 || static_cast<std::size_t>(r) >= el.per_hashing.size()) return false;
  const HashingNoise& hn = el.per_hashing[static_cast<std::size_t>(r)];
  const double bound = std::abs(el.residual) / 20.0;
  if (!(hn.e_head < bound)) return false;
  for (double v : hn.e_tail_shift)
    if (!(v < bound)) return false;
  for (int s = 0; s < grid.d; ++s)
    if (!check_balanced(grid, probes, s, delta, balance_fraction)) return false;
  return true;
}

int certifying_hashing(const NoiseProfile& profile, const Grid& grid, std::uint64_t i_flat, const std::vector<std::vector<ProbePair>>& probes,
                       std::int64_t delta, double balance_fraction) {
  for (std::size_t r = 0; r < probes.size(); ++r)
    if (certifies_location(profile, grid, i_flat, static_cast<int>(r), probes[r], delta, balance_fraction)) return static_cast<int>(r);
  return -1;
}

}  // namespace sfft
