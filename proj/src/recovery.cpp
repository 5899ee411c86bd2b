#include "recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "estimation.hpp"
#include "location.hpp"

namespace sfft {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

std::vector<GridIndex> locate_all(const MeasurementSet& m, const Tuning& tuning) {
  std::set<std::uint64_t> seen;
  for (int r = 0; r < m.r_max; ++r)
    for (const GridIndex& i : locate_signal(m, r, tuning).found) seen.insert(m.grid.flat(i));
  std::vector<GridIndex> L;
  L.reserve(seen.size());
  for (std::uint64_t f : seen) L.push_back(m.grid.index(f));
  return L;
}

double residual_proxy(const MeasurementSet& m) {
  double s = 0;
  for (int r = 0; r < m.r_max; ++r) {
    const cplx* t = m.table(r, 0, 0);
    for (std::uint64_t j = 0; j < m.B; ++j) s += std::abs(t[j]);
  }
  return s;
}

std::uint64_t buckets_for(const Grid& grid, double target) { return pow_u64(static_cast<std::uint64_t>(bucket_side_for(grid, target)), grid.d); }

int probe_count(const Grid& grid, const Tuning& tuning) {
  const double N = static_cast<double>(grid.size());
  return std::max(1, static_cast<int>(std::ceil(tuning.location_repetition_constant * loglog2(N) / std::sqrt(tuning.alpha))));
}

}  // namespace

double log4N(const Grid& grid) { return std::pow(static_cast<double>(grid.log2N()), 4.0); }

int l1_inner_iterations(const Grid& grid) { return static_cast<int>(std::floor(std::log2(log4N(grid)))) + 1; }

int l1_estimation_repetitions(const Grid& grid, const RecoveryParams& p) {
  const double N = static_cast<double>(grid.size());
  const double ratio = std::max(1.0, static_cast<double>(p.B) / static_cast<double>(p.k));
  const double v = p.tuning.estimation_repetition_constant * (loglog2(N) + grid.d * grid.d + std::log2(ratio));
  return std::max(1, static_cast<int>(std::ceil(v)));
}

int log_repetitions(const Grid& grid, const Tuning& tuning) {
  return std::max(1, static_cast<int>(std::ceil(tuning.log_repetition_constant * grid.log2N())));
}

SparseApprox reduce_l1_norm(MeasurementSet& mset, SampleAccess& xhat, const SparseApprox& chi, const RecoveryParams& p, double nu, double mu, Rng& rng,
                            RecoveryReport* report) {
  const Grid& g = mset.grid;
  const int inner = l1_inner_iterations(g);
  const int reps = l1_estimation_repetitions(g, p);
  SparseApprox total = chi.empty() ? SparseApprox(g) : chi;
  for (int t = 0; t < inner; ++t) {
    const std::vector<GridIndex> L = locate_all(mset, p.tuning);
    const double threshold = p.tuning.l1_threshold_fraction * nu * std::ldexp(1.0, -t) + 4.0 * mu;
    Rng er = rng.child(static_cast<std::uint64_t>(t));
    const EstimateBatch batch = estimate_values(xhat, total, L, 4 * p.k, 1.0, threshold, reps, p.tuning, er);
    if (report) {
      report->samples.estimation += batch.samples;
      ++report->estimate_calls;
    }
    total.add(batch.kept);
    update_residual_measurements(mset, batch.kept);
  }
  return total;
}

SparseApprox reduce_inf_norm(SampleAccess& xhat, const SparseApprox& chi, std::uint64_t k_tilde, double nu, double r_star, double mu, const RecoveryParams& p,
                             Rng& rng, RecoveryReport* report) {
  const Grid& g = xhat.grid();
  const Tuning& tu = p.tuning;
  const std::uint64_t before = xhat.count();
  const std::uint64_t B = buckets_for(g, tu.location_bucket_factor * static_cast<double>(k_tilde) / std::pow(tu.alpha, g.d));
  const int r_max = std::max(1, static_cast<int>(std::ceil(tu.inf_norm_repetition_constant * g.log2N() / std::sqrt(tu.alpha))));
  const int T = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(r_star, 1.0)) - 1e-12)));
  Rng acq = rng.child(0);
  MeasurementSet m = acquire_measurements(xhat, B, 2 * g.d, r_max, probe_count(g, tu), tu.precision_c, acq, tu.redraw_unbalanced_probes ? tu.balance_fraction : 0.0);
  if (!chi.empty()) update_residual_measurements(m, chi);
  SparseApprox current = chi.empty() ? SparseApprox(g) : chi;
  SparseApprox correction(g);
  for (int t = 0; t < T; ++t) {
    const std::vector<GridIndex> L = locate_all(m, tu);
    const double threshold = 5.0 * (nu * std::ldexp(1.0, T - (t + 1)) + mu);
    Rng er = rng.child(static_cast<std::uint64_t>(t) + 1);
    const EstimateBatch batch = estimate_values(xhat, current, L, k_tilde, 1.0, threshold, log_repetitions(g, tu), tu, er);
    if (report) ++report->inf_norm_estimate_calls;
    correction.add(batch.kept);
    current.add(batch.kept);
    update_residual_measurements(m, batch.kept);
  }
  if (report) report->samples.inf_norm += xhat.count() - before;
  return correction;
}

SparseApprox recover_at_constant_snr(SampleAccess& xhat, const SparseApprox& chi, std::uint64_t k, double epsilon, const RecoveryParams& p, Rng& rng,
                                     RecoveryReport* report) {
  const Grid& g = xhat.grid();
  const Tuning& tu = p.tuning;
  const std::uint64_t before = xhat.count();
  const std::uint64_t B = buckets_for(g, tu.const_snr_bucket_factor * static_cast<double>(k) / (epsilon * std::pow(tu.alpha, g.d)));
  Rng acq = rng.child(0);
  MeasurementSet m = acquire_measurements(xhat, B, 2 * g.d, 1, probe_count(g, tu), tu.precision_c, acq, tu.redraw_unbalanced_probes ? tu.balance_fraction : 0.0);
  if (!chi.empty()) update_residual_measurements(m, chi);
  const std::vector<GridIndex> L = locate_signal(m, 0, tu).found;
  Rng er = rng.child(1);
  const SparseApprox current = chi.empty() ? SparseApprox(g) : chi;
  const EstimateBatch batch = estimate_values(xhat, current, L, k, epsilon, 0.0, log_repetitions(g, tu), tu, er);

  std::vector<std::pair<double, std::uint64_t>> ranked;
  for (const auto& [flat, v] : batch.kept.entries) ranked.emplace_back(std::abs(v), flat);
  const std::size_t keep = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(4 * k));
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  SparseApprox out(g);
  for (std::size_t i = 0; i < keep; ++i) out.set(ranked[i].second, batch.kept.get(ranked[i].second));
  if (report) report->samples.const_snr += xhat.count() - before;
  return out;
}

SparseApprox sparse_fft(const DenseSignal& xhat, const RecoveryParams& params, RecoveryReport* report) {
  const Grid& g = xhat.grid;
  const RecoveryParams p = complete_params(g, params);
  validate_params(g, p);
  RecoveryReport local;
  RecoveryReport& rep = report ? *report : local;
  rep = RecoveryReport{};
  rep.T = p.T;

  const Rng root(p.seed);
  SampleAccess loc(xhat), est(xhat), inf(xhat), cs(xhat);
  auto t0 = Clock::now();
  Rng acq = root.child(1);
  MeasurementSet mset = acquire_measurements(loc, p, acq);
  rep.samples.location = loc.count();
  rep.ms_acquire = ms_since(t0);

  const double L4 = log4N(g);
  const double mu = p.mu;
  const std::uint64_t k_tilde = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(4.0 * static_cast<double>(p.k) / L4)));
  SnrLoopState state{SparseApprox(g), 0, 0.0};
  const double initial = residual_proxy(mset);
  rep.residual_proxy.push_back(initial);
  for (state.t = 0; state.t < p.T; ++state.t) {
    const int t = state.t;
    const double before = residual_proxy(mset);
    state.nu = 4.0 * mu * std::pow(L4, p.T - t);
    Rng lr = root.child(100 + static_cast<std::uint64_t>(t));
    t0 = Clock::now();
    state.chi = reduce_l1_norm(mset, est, state.chi, p, state.nu, mu, lr, &rep);
    rep.ms_l1 += ms_since(t0);

    const double nu_prime = L4 * (4.0 * mu * std::pow(L4, p.T - t - 1) + 20.0 * mu);
    const double r_star = std::max(2.0, static_cast<double>(p.k) / L4);
    Rng ir = root.child(200 + static_cast<std::uint64_t>(t));
    t0 = Clock::now();
    const SparseApprox corr = reduce_inf_norm(inf, state.chi, k_tilde, nu_prime, r_star, nu_prime, p, ir, &rep);
    state.chi.add(corr);
    update_residual_measurements(mset, corr);
    rep.ms_inf += ms_since(t0);

    const double after = residual_proxy(mset);
    rep.residual_proxy.push_back(after);
    if (after > p.tuning.divergence_factor * before + 1e-6 * initial)
      throw DivergenceError("residual bucket mass grew from " + std::to_string(before) + " to " + std::to_string(after) + " in outer iteration " +
                            std::to_string(t));
  }

  Rng cr = root.child(300);
  t0 = Clock::now();
  const SparseApprox last = recover_at_constant_snr(cs, state.chi, 2 * p.k, p.epsilon, p, cr, &rep);
  rep.ms_const_snr = ms_since(t0);
  SparseApprox out = state.chi;
  out.add(last);
  out.drop_at_most(p.tuning.zero_drop_factor * mu);
  return out;
}

SparseApprox sparse_fft(const DenseSignal& xhat, std::uint64_t k, double epsilon, double r_star, double mu, std::uint64_t seed) {
  RecoveryParams p;
  p.k = k;
  p.epsilon = epsilon;
  p.r_star = r_star;
  p.mu = mu;
  p.seed = seed;
  return sparse_fft(xhat, p);
}

}  // namespace sfft
