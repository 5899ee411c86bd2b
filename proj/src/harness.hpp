#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace sfft {

enum class SignalModel { exact_sparse, gaussian_tail, adversarial_tail };

std::string to_string(SignalModel m);
SignalModel signal_model_from_string(const std::string& s);

struct ExperimentSpec {
  std::string name = "experiment";
  std::int64_t n = 1024;
  int d = 1;
  std::uint64_t k = 8;
  SignalModel model = SignalModel::exact_sparse;
  // Noisy models: heads have magnitude in [snr, 2 snr] times the measured mu.
  double snr = 10.0;
  double epsilon = 0.5;
  std::vector<std::uint64_t> seeds{1};
  // For exact signals mu = mu_floor * (smallest head magnitude).
  double mu_floor = 1e-9;
  // Multiplies the measured mu of noisy signals before it is handed to the solver.
  double mu_factor = 1.0;
  // Overrides; zero keeps the default.
  double r_star = 0;
  std::uint64_t B = 0;
  int F = 0;
  int r_max = 0;
  int c_max = 0;
  int T = 0;
  Tuning tuning;
};

nlohmann::json to_json(const Tuning& t);
Tuning tuning_from_json(const nlohmann::json& j, Tuning base = {});
nlohmann::json to_json(const ExperimentSpec& s);
ExperimentSpec spec_from_json(const nlohmann::json& j);
ExperimentSpec load_spec(const std::string& path);
void validate_spec(const ExperimentSpec& s);
// Sets one field by name ("k", "n", "snr", "constants.alpha", ...) from its text form.
void set_spec_param(ExperimentSpec& s, const std::string& name, const std::string& value);
// FNV-1a of the canonical JSON of the spec without its seed list.
std::string spec_hash(const ExperimentSpec& s);

struct GeneratedSignal {
  DenseSignal x;        // sparse side
  DenseSignal xhat;     // sampled side
  SparseApprox heads;   // planted coefficients
  double tail_energy = 0;  // ||x - heads||_2^2
  double mu_true = 0;      // sqrt(tail_energy / k)
};

GeneratedSignal generate_signal(const ExperimentSpec& spec, std::uint64_t seed);

struct RunRecord {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  int d = 0;
  std::uint64_t k = 0;
  std::string model;
  double epsilon = 0;
  std::string status = "ok";
  double l2_error_sq = 0;
  double tail_sq = 0;
  // error^2 / tail^2, or error^2 / ||x||^2 when the tail is zero.
  double l2_error_ratio = 0;
  double support_precision = 0;
  double support_recall = 0;
  double max_rel_coef_error = 0;
  std::uint64_t output_size = 0;
  int T = 0;
  std::uint64_t samples_location = 0;
  std::uint64_t samples_estimation = 0;
  std::uint64_t samples_inf_norm = 0;
  std::uint64_t samples_const_snr = 0;
  std::uint64_t samples_total = 0;
  double wall_time_ms = 0;
  double ms_acquire = 0;
  double ms_l1 = 0;
  double ms_inf = 0;
  double ms_const_snr = 0;

  // Equal in everything except timings.
  bool same_result(const RunRecord& o) const;
};

RecoveryParams recovery_params(const ExperimentSpec& spec, const GeneratedSignal& sig, std::uint64_t seed);
RunRecord run_single(const ExperimentSpec& spec, std::uint64_t seed);

// Worker count from SFFT_THREADS, else hardware concurrency.
int worker_count();
// Runs every seed; records come back in seed order.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, int threads = 0);

const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(std::istream& in);
nlohmann::json sidecar_json(const ExperimentSpec& spec, const std::vector<RunRecord>& records);

struct SweepPoint {
  std::string value;
  std::vector<RunRecord> records;
};

std::vector<SweepPoint> run_sweep(const ExperimentSpec& spec, const std::string& param, const std::vector<std::string>& values, int threads = 0);
// Long format: param, value, seed, metric, measurement.
void write_tidy_csv(std::ostream& out, const std::string& param, const std::vector<SweepPoint>& points);

// Writes text to path, reporting the path on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace sfft
