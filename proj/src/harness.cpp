#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "dense_dft.hpp"
#include "recovery.hpp"
#include "rng.hpp"

namespace sfft {

using nlohmann::json;

std::string to_string(SignalModel m) {
  switch (m) {
    case SignalModel::exact_sparse:
      return "exact-sparse";
    case SignalModel::gaussian_tail:
      return "sparse-plus-gaussian-tail";
    case SignalModel::adversarial_tail:
      return "sparse-plus-adversarial-bucket-tail";
  }
  return "unknown";
}

SignalModel signal_model_from_string(const std::string& s) {
  if (s == "exact-sparse") return SignalModel::exact_sparse;
  if (s == "sparse-plus-gaussian-tail") return SignalModel::gaussian_tail;
  if (s == "sparse-plus-adversarial-bucket-tail") return SignalModel::adversarial_tail;
  throw ParameterError("unknown signal model '" + s + "'");
}

// Field table shared by the JSON reader, writer and set_spec_param.
#define SFFT_TUNING_FIELDS(X)          \
  X(alpha)                             \
  X(location_bucket_factor)            \
  X(location_repetition_constant)      \
  X(estimation_repetition_constant)    \
  X(log_repetition_constant)           \
  X(inf_norm_repetition_constant)      \
  X(const_snr_bucket_factor)           \
  X(l1_threshold_fraction)             \
  X(balance_fraction)                  \
  X(redraw_unbalanced_probes)          \
  X(vote_fraction)                     \
  X(ratio_tolerance)                   \
  X(reference_floor)                   \
  X(precision_c)                       \
  X(divergence_factor)                 \
  X(zero_drop_factor)                  \
  X(estimation_buckets)

json to_json(const Tuning& t) {
  json j;
#define X(f) j[#f] = t.f;
  SFFT_TUNING_FIELDS(X)
#undef X
  return j;
}

Tuning tuning_from_json(const json& j, Tuning t) {
  if (!j.is_object()) throw ParameterError("constants must be a JSON object");
  static const std::set<std::string> known = {
#define X(f) #f,
      SFFT_TUNING_FIELDS(X)
#undef X
  };
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ParameterError("unknown constant '" + it.key() + "'");
#define X(f) \
  if (j.contains(#f)) j.at(#f).get_to(t.f);
  SFFT_TUNING_FIELDS(X)
#undef X
  return t;
}

json to_json(const ExperimentSpec& s) {
  json j;
  j["name"] = s.name;
  j["n"] = s.n;
  j["d"] = s.d;
  j["k"] = s.k;
  j["signal_model"] = to_string(s.model);
  j["snr"] = s.snr;
  j["epsilon"] = s.epsilon;
  j["seeds"] = s.seeds;
  j["mu_floor"] = s.mu_floor;
  j["mu_factor"] = s.mu_factor;
  j["overrides"] = {{"r_star", s.r_star}, {"B", s.B}, {"F", s.F}, {"r_max", s.r_max}, {"c_max", s.c_max}, {"T", s.T}};
  j["constants"] = to_json(s.tuning);
  return j;
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  try {
    if (j.contains("name")) j.at("name").get_to(s.name);
    if (j.contains("n")) j.at("n").get_to(s.n);
    if (j.contains("d")) j.at("d").get_to(s.d);
    if (j.contains("k")) j.at("k").get_to(s.k);
    if (j.contains("signal_model")) s.model = signal_model_from_string(j.at("signal_model").get<std::string>());
    if (j.contains("snr")) j.at("snr").get_to(s.snr);
    if (j.contains("epsilon")) j.at("epsilon").get_to(s.epsilon);
    if (j.contains("seeds")) j.at("seeds").get_to(s.seeds);
    if (j.contains("mu_floor")) j.at("mu_floor").get_to(s.mu_floor);
    if (j.contains("mu_factor")) j.at("mu_factor").get_to(s.mu_factor);
    if (j.contains("overrides")) {
      const json& o = j.at("overrides");
      if (o.contains("r_star")) o.at("r_star").get_to(s.r_star);
      if (o.contains("B")) o.at("B").get_to(s.B);
      if (o.contains("F")) o.at("F").get_to(s.F);
      if (o.contains("r_max")) o.at("r_max").get_to(s.r_max);
      if (o.contains("c_max")) o.at("c_max").get_to(s.c_max);
      if (o.contains("T")) o.at("T").get_to(s.T);
    }
    if (j.contains("constants")) s.tuning = tuning_from_json(j.at("constants"), s.tuning);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad experiment spec: ") + e.what());
  }
  validate_spec(s);
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError(path + ": " + e.what());
  }
  return spec_from_json(j);
}

void validate_spec(const ExperimentSpec& s) {
  const Grid g(s.n, s.d);
  if (s.seeds.empty()) throw ParameterError("seed list is empty");
  if (s.k < 1) throw ParameterError("k must be >= 1");
  if (4 * s.k > g.size()) throw ParameterError("k must be at most N/4");
  if (!(s.snr > 0)) throw ParameterError("snr must be positive");
  if (!(s.epsilon > 0 && s.epsilon <= 1)) throw ParameterError("epsilon must be in (0, 1]");
  if (!(s.mu_floor > 0) || !(s.mu_factor > 0)) throw ParameterError("mu_floor and mu_factor must be positive");
}

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos) {
      const std::uint64_t lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(std::stoull(item));
    }
  }
  return out;
}

}  // namespace

void set_spec_param(ExperimentSpec& s, const std::string& name, const std::string& value) {
  try {
    if (name == "n") s.n = std::stoll(value);
    else if (name == "d") s.d = std::stoi(value);
    else if (name == "k") s.k = std::stoull(value);
    else if (name == "signal_model") s.model = signal_model_from_string(value);
    else if (name == "snr") s.snr = std::stod(value);
    else if (name == "epsilon") s.epsilon = std::stod(value);
    else if (name == "seeds") s.seeds = parse_seed_list(value);
    else if (name == "mu_floor") s.mu_floor = std::stod(value);
    else if (name == "mu_factor") s.mu_factor = std::stod(value);
    else if (name == "r_star") s.r_star = std::stod(value);
    else if (name == "B") s.B = std::stoull(value);
    else if (name == "F") s.F = std::stoi(value);
    else if (name == "r_max") s.r_max = std::stoi(value);
    else if (name == "c_max") s.c_max = std::stoi(value);
    else if (name == "T") s.T = std::stoi(value);
    else if (name.rfind("constants.", 0) == 0) {
      json j;
      const std::string field = name.substr(10);
      if (field == "estimation_buckets") j[field] = std::stoull(value);
      else if (field == "redraw_unbalanced_probes") {
        if (value != "true" && value != "false") throw ParameterError("bad value '" + value + "' for " + name);
        j[field] = value == "true";
      }
      else j[field] = std::stod(value);
      s.tuning = tuning_from_json(j, s.tuning);
    } else {
      throw ParameterError("unknown parameter '" + name + "'");
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ParameterError*>(&e)) throw;
    throw ParameterError("bad value '" + value + "' for " + name);
  }
}

std::string spec_hash(const ExperimentSpec& s) {
  json j = to_json(s);
  j.erase("seeds");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

GeneratedSignal generate_signal(const ExperimentSpec& spec, std::uint64_t seed) {
  validate_spec(spec);
  const Grid g(spec.n, spec.d);
  const std::uint64_t N = g.size();
  Rng rng(derive_seed(seed, 0x5167));

  GeneratedSignal out;
  out.x = DenseSignal(g, Domain::time);
  out.heads = SparseApprox(g);
  std::set<std::uint64_t> support;
  while (support.size() < spec.k) support.insert(static_cast<std::uint64_t>(rng.uniform_int(0, static_cast<std::int64_t>(N) - 1)));
  std::vector<cplx> head_values;
  for (std::size_t i = 0; i < support.size(); ++i) head_values.push_back(std::polar(1.0 + rng.uniform(), 2.0 * kPi * rng.uniform()));

  // Nominal tail energy is k, i.e. mu = 1 before measuring.
  const double energy = static_cast<double>(spec.k);
  if (spec.model == SignalModel::gaussian_tail) {
    const double sd = std::sqrt(energy / (2.0 * static_cast<double>(N - spec.k)));
    for (std::uint64_t f = 0; f < N; ++f)
      if (!support.count(f)) out.x.values[f] = cplx(rng.normal(), rng.normal()) * sd;
  } else if (spec.model == SignalModel::adversarial_tail) {
    // All tail energy inside one l_inf ball, so it crowds whichever buckets the ball lands in.
    const std::int64_t radius = std::max<std::int64_t>(1, g.n / 64);
    GridIndex center(g.d);
    for (int s = 0; s < g.d; ++s) center[s] = rng.uniform_int(0, g.n - 1);
    std::vector<std::uint64_t> ball;
    for (std::uint64_t f = 0; f < N; ++f)
      if (!support.count(f) && g.circular_norm_inf(g.sub(g.index(f), center)) <= radius) ball.push_back(f);
    const double sd = std::sqrt(energy / (2.0 * static_cast<double>(ball.size())));
    for (std::uint64_t f : ball) out.x.values[f] = cplx(rng.normal(), rng.normal()) * sd;
  }
  for (std::uint64_t f = 0; f < N; ++f)
    if (!support.count(f)) out.tail_energy += std::norm(out.x.values[f]);
  out.mu_true = std::sqrt(out.tail_energy / static_cast<double>(spec.k));

  // Heads: magnitude in [1, 2] for exact signals, [snr, 2 snr] * mu_true otherwise.
  const double scale = spec.model == SignalModel::exact_sparse ? 1.0 : spec.snr * out.mu_true;
  std::size_t idx = 0;
  for (std::uint64_t f : support) {
    const cplx v = scale * head_values[idx++];
    out.x.values[f] = v;
    out.heads.set(f, v);
  }
  out.xhat = forward_dft(out.x);
  return out;
}

bool RunRecord::same_result(const RunRecord& o) const {
  return spec_hash == o.spec_hash && seed == o.seed && n == o.n && d == o.d && k == o.k && model == o.model && epsilon == o.epsilon && status == o.status &&
         l2_error_sq == o.l2_error_sq && tail_sq == o.tail_sq && l2_error_ratio == o.l2_error_ratio && support_precision == o.support_precision &&
         support_recall == o.support_recall && max_rel_coef_error == o.max_rel_coef_error && output_size == o.output_size && T == o.T &&
         samples_location == o.samples_location && samples_estimation == o.samples_estimation && samples_inf_norm == o.samples_inf_norm &&
         samples_const_snr == o.samples_const_snr && samples_total == o.samples_total;
}

RecoveryParams recovery_params(const ExperimentSpec& spec, const GeneratedSignal& sig, std::uint64_t seed) {
  RecoveryParams p;
  p.k = spec.k;
  p.epsilon = spec.epsilon;
  double smallest = 0;
  for (const auto& [f, v] : sig.heads.entries) smallest = smallest == 0 ? std::abs(v) : std::min(smallest, std::abs(v));
  p.mu = sig.tail_energy > 0 ? sig.mu_true * spec.mu_factor : spec.mu_floor * smallest;
  double peak = 0;
  for (const cplx& v : sig.x.values) peak = std::max(peak, std::abs(v));
  p.r_star = spec.r_star > 0 ? spec.r_star : std::max(2.0, peak / p.mu);
  p.B = spec.B;
  p.F = spec.F;
  p.r_max = spec.r_max;
  p.c_max = spec.c_max;
  p.T = spec.T;
  p.seed = derive_seed(seed, 0x50f7);
  p.tuning = spec.tuning;
  return p;
}

RunRecord run_single(const ExperimentSpec& spec, std::uint64_t seed) {
  const GeneratedSignal sig = generate_signal(spec, seed);
  const RecoveryParams p = recovery_params(spec, sig, seed);
  RunRecord rec;
  rec.spec_hash = spec_hash(spec);
  rec.seed = seed;
  rec.n = spec.n;
  rec.d = spec.d;
  rec.k = spec.k;
  rec.model = to_string(spec.model);
  rec.epsilon = spec.epsilon;
  rec.tail_sq = sig.tail_energy;

  RecoveryReport rep;
  SparseApprox out(sig.x.grid);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    out = sparse_fft(sig.xhat, p, &rep);
  } catch (const DivergenceError&) {
    rec.status = "divergence";
  }
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  double err = 0, signal = 0;
  for (std::uint64_t f = 0; f < sig.x.values.size(); ++f) {
    err += std::norm(sig.x.values[f] - out.get(f));
    signal += std::norm(sig.x.values[f]);
  }
  rec.l2_error_sq = err;
  rec.l2_error_ratio = sig.tail_energy > 0 ? err / sig.tail_energy : (signal > 0 ? err / signal : 0.0);
  std::uint64_t hits = 0;
  double worst = 0;
  for (const auto& [f, v] : sig.heads.entries) {
    if (out.entries.count(f)) ++hits;
    worst = std::max(worst, std::abs(out.get(f) - v) / std::abs(v));
  }
  rec.output_size = out.size();
  rec.support_recall = static_cast<double>(hits) / static_cast<double>(spec.k);
  rec.support_precision = out.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(out.size());
  rec.max_rel_coef_error = worst;
  rec.T = rep.T;
  rec.samples_location = rep.samples.location;
  rec.samples_estimation = rep.samples.estimation;
  rec.samples_inf_norm = rep.samples.inf_norm;
  rec.samples_const_snr = rep.samples.const_snr;
  rec.samples_total = rep.samples.total();
  rec.ms_acquire = rep.ms_acquire;
  rec.ms_l1 = rep.ms_l1;
  rec.ms_inf = rep.ms_inf;
  rec.ms_const_snr = rep.ms_const_snr;
  return rec;
}

int worker_count() {
  if (const char* env = std::getenv("SFFT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, int threads) {
  validate_spec(spec);
  const std::size_t jobs = spec.seeds.size();
  std::vector<RunRecord> records(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        records[i] = run_single(spec, spec.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int count = static_cast<int>(std::min<std::size_t>(jobs, static_cast<std::size_t>(threads > 0 ? threads : worker_count())));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {"spec_hash",
                                                "seed",
                                                "n",
                                                "d",
                                                "k",
                                                "signal_model",
                                                "epsilon",
                                                "status",
                                                "l2_error_sq",
                                                "tail_sq",
                                                "l2_error_ratio",
                                                "support_precision",
                                                "support_recall",
                                                "max_rel_coef_error",
                                                "output_size",
                                                "T",
                                                "samples_location",
                                                "samples_estimation",
                                                "samples_inf_norm",
                                                "samples_const_snr",
                                                "samples_total",
                                                "wall_time_ms",
                                                "ms_acquire",
                                                "ms_l1",
                                                "ms_inf",
                                                "ms_const_snr"};
  return cols;
}

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const RunRecord& r : records) {
    out << r.spec_hash << ',' << r.seed << ',' << r.n << ',' << r.d << ',' << r.k << ',' << r.model << ',' << fmt(r.epsilon) << ',' << r.status << ','
        << fmt(r.l2_error_sq) << ',' << fmt(r.tail_sq) << ',' << fmt(r.l2_error_ratio) << ',' << fmt(r.support_precision) << ',' << fmt(r.support_recall)
        << ',' << fmt(r.max_rel_coef_error) << ',' << r.output_size << ',' << r.T << ',' << r.samples_location << ',' << r.samples_estimation << ','
        << r.samples_inf_norm << ',' << r.samples_const_snr << ',' << r.samples_total << ',' << fmt(r.wall_time_ms) << ',' << fmt(r.ms_acquire) << ','
        << fmt(r.ms_l1) << ',' << fmt(r.ms_inf) << ',' << fmt(r.ms_const_snr) << '\n';
  }
  if (!out) throw IoError("failed to write CSV");
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) header.push_back(c);
  }
  if (header != csv_columns()) throw IoError("CSV header does not match the run record schema");
  std::vector<RunRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    if (f.size() != header.size()) throw IoError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields");
    try {
      RunRecord r;
      std::size_t i = 0;
      r.spec_hash = f[i++];
      r.seed = std::stoull(f[i++]);
      r.n = std::stoll(f[i++]);
      r.d = std::stoi(f[i++]);
      r.k = std::stoull(f[i++]);
      r.model = f[i++];
      r.epsilon = std::stod(f[i++]);
      r.status = f[i++];
      r.l2_error_sq = std::stod(f[i++]);
      r.tail_sq = std::stod(f[i++]);
      r.l2_error_ratio = std::stod(f[i++]);
      r.support_precision = std::stod(f[i++]);
      r.support_recall = std::stod(f[i++]);
      r.max_rel_coef_error = std::stod(f[i++]);
      r.output_size = std::stoull(f[i++]);
      r.T = std::stoi(f[i++]);
      r.samples_location = std::stoull(f[i++]);
      r.samples_estimation = std::stoull(f[i++]);
      r.samples_inf_norm = std::stoull(f[i++]);
      r.samples_const_snr = std::stoull(f[i++]);
      r.samples_total = std::stoull(f[i++]);
      r.wall_time_ms = std::stod(f[i++]);
      r.ms_acquire = std::stod(f[i++]);
      r.ms_l1 = std::stod(f[i++]);
      r.ms_inf = std::stod(f[i++]);
      r.ms_const_snr = std::stod(f[i++]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IoError("CSV line " + std::to_string(lineno) + ": bad field value");
    }
  }
  return out;
}

json sidecar_json(const ExperimentSpec& spec, const std::vector<RunRecord>& records) {
  json j;
  j["spec_hash"] = spec_hash(spec);
  j["spec"] = to_json(spec);
  j["columns"] = csv_columns();
  j["runs"] = records.size();
  std::size_t ok = 0;
  double recall = 0;
  for (const auto& r : records) {
    ok += r.status == "ok";
    recall += r.support_recall;
  }
  j["runs_ok"] = ok;
  j["mean_support_recall"] = records.empty() ? 0.0 : recall / static_cast<double>(records.size());
  return j;
}

std::vector<SweepPoint> run_sweep(const ExperimentSpec& spec, const std::string& param, const std::vector<std::string>& values, int threads) {
  std::vector<SweepPoint> out;
  for (const std::string& v : values) {
    ExperimentSpec s = spec;
    set_spec_param(s, param, v);
    validate_spec(s);
    out.push_back({v, run_experiment(s, threads)});
  }
  return out;
}

void write_tidy_csv(std::ostream& out, const std::string& param, const std::vector<SweepPoint>& points) {
  out << "param,value,seed,metric,measurement\n";
  for (const SweepPoint& p : points)
    for (const RunRecord& r : p.records) {
      const std::pair<const char*, double> metrics[] = {{"l2_error_ratio", r.l2_error_ratio},
                                                         {"support_precision", r.support_precision},
                                                         {"support_recall", r.support_recall},
                                                         {"samples_location", static_cast<double>(r.samples_location)},
                                                         {"samples_estimation", static_cast<double>(r.samples_estimation)},
                                                         {"samples_total", static_cast<double>(r.samples_total)},
                                                         {"wall_time_ms", r.wall_time_ms}};
      for (const auto& [name, v] : metrics) out << param << ',' << p.value << ',' << r.seed << ',' << name << ',' << fmt(v) << '\n';
    }
  if (!out) throw IoError("failed to write tidy CSV");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sfft
