#include "sfft/sfft.h"

#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dense_dft.hpp"
#include "harness.hpp"
#include "recovery.hpp"

struct sfft_signal {
  sfft::DenseSignal xhat;
};

struct sfft_result {
  std::vector<std::pair<std::uint64_t, sfft::cplx>> entries;
  sfft::SampleReport samples;
};

struct sfft_experiment {
  sfft::ExperimentSpec spec;
};

namespace {

thread_local std::string last_error;

sfft_status fail(sfft_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Runs body and maps library exceptions onto status codes.
template <class F>
sfft_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return SFFT_OK;
  } catch (const sfft::DimensionError& e) {
    return fail(SFFT_ERR_DIMENSION, e.what());
  } catch (const sfft::ParameterError& e) {
    return fail(SFFT_ERR_PARAMETER, e.what());
  } catch (const sfft::DivergenceError& e) {
    return fail(SFFT_ERR_DIVERGENCE, e.what());
  } catch (const sfft::IoError& e) {
    return fail(SFFT_ERR_IO, e.what());
  } catch (const sfft::ScaleError& e) {
    return fail(SFFT_ERR_SCALE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SFFT_ERR_INTERNAL, "out of memory");
  } catch (const std::invalid_argument& e) {
    return fail(SFFT_ERR_PARAMETER, e.what());
  } catch (const std::exception& e) {
    return fail(SFFT_ERR_INTERNAL, e.what());
  }
}

sfft::RecoveryParams to_params(const sfft_params& p) {
  sfft::RecoveryParams r;
  r.k = p.k;
  r.epsilon = p.epsilon;
  r.mu = p.mu;
  r.r_star = p.r_star;
  r.B = p.B;
  r.F = p.F;
  r.r_max = p.r_max;
  r.c_max = p.c_max;
  r.T = p.T;
  r.seed = p.seed;
  return r;
}

#define SFFT_REQUIRE(cond, msg) \
  if (!(cond)) return fail(SFFT_ERR_PARAMETER, msg)

}  // namespace

extern "C" {

const char* sfft_last_error(void) { return last_error.c_str(); }

const char* sfft_status_name(sfft_status status) {
  switch (status) {
    case SFFT_OK:
      return "ok";
    case SFFT_ERR_PARAMETER:
      return "parameter error";
    case SFFT_ERR_DIMENSION:
      return "dimension error";
    case SFFT_ERR_DIVERGENCE:
      return "divergence";
    case SFFT_ERR_IO:
      return "i/o error";
    case SFFT_ERR_SCALE:
      return "scale error";
    case SFFT_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* sfft_version(void) { return "1.0.0"; }

void sfft_params_default(sfft_params* params) {
  if (!params) return;
  *params = sfft_params{};
  params->k = 1;
  params->epsilon = 0.5;
  params->mu = 0.0;
  params->r_star = 2.0;
}

sfft_status sfft_signal_create(int64_t n, int d, const double* interleaved, sfft_signal** out) {
  SFFT_REQUIRE(interleaved && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const sfft::Grid g(n, d);
    auto* s = new sfft_signal{sfft::DenseSignal(g, sfft::Domain::frequency)};
    for (std::uint64_t i = 0; i < g.size(); ++i) s->xhat.values[i] = {interleaved[2 * i], interleaved[2 * i + 1]};
    *out = s;
  });
}

sfft_status sfft_signal_from_sparse(int64_t n, int d, size_t count, const uint64_t* flat, const double* interleaved, sfft_signal** out) {
  SFFT_REQUIRE(out && (count == 0 || (flat && interleaved)), "null argument");
  *out = nullptr;
  return guarded([&] {
    const sfft::Grid g(n, d);
    sfft::DenseSignal x(g, sfft::Domain::time);
    for (size_t i = 0; i < count; ++i) {
      if (flat[i] >= g.size()) throw sfft::DimensionError("flat index " + std::to_string(flat[i]) + " outside the grid");
      x.values[flat[i]] += sfft::cplx(interleaved[2 * i], interleaved[2 * i + 1]);
    }
    *out = new sfft_signal{sfft::forward_dft(x)};
  });
}

void sfft_signal_destroy(sfft_signal* signal) { delete signal; }

uint64_t sfft_signal_size(const sfft_signal* signal) { return signal ? signal->xhat.grid.size() : 0; }

sfft_status sfft_recover(const sfft_signal* spectrum, const sfft_params* params, sfft_result** out) {
  SFFT_REQUIRE(spectrum && params && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    sfft::RecoveryReport rep;
    const sfft::SparseApprox x = sfft::sparse_fft(spectrum->xhat, to_params(*params), &rep);
    auto* r = new sfft_result;
    r->entries.assign(x.entries.begin(), x.entries.end());
    r->samples = rep.samples;
    *out = r;
  });
}

void sfft_result_destroy(sfft_result* result) { delete result; }

size_t sfft_result_count(const sfft_result* result) { return result ? result->entries.size() : 0; }

sfft_status sfft_result_entry(const sfft_result* result, size_t i, uint64_t* flat, double* re, double* im) {
  SFFT_REQUIRE(result, "null result");
  if (i >= result->entries.size()) return fail(SFFT_ERR_DIMENSION, "entry index out of range");
  const auto& [f, v] = result->entries[i];
  if (flat) *flat = f;
  if (re) *re = v.real();
  if (im) *im = v.imag();
  return SFFT_OK;
}

sfft_status sfft_result_samples(const sfft_result* result, sfft_sample_report* out) {
  SFFT_REQUIRE(result && out, "null argument");
  out->location = result->samples.location;
  out->estimation = result->samples.estimation;
  out->inf_norm = result->samples.inf_norm;
  out->const_snr = result->samples.const_snr;
  out->total = result->samples.total();
  return SFFT_OK;
}

sfft_status sfft_experiment_from_json(const char* json_text, sfft_experiment** out) {
  SFFT_REQUIRE(json_text && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      throw sfft::ParameterError(std::string("bad spec JSON: ") + e.what());
    }
    *out = new sfft_experiment{sfft::spec_from_json(j)};
  });
}

sfft_status sfft_experiment_from_file(const char* path, sfft_experiment** out) {
  SFFT_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new sfft_experiment{sfft::load_spec(path)}; });
}

void sfft_experiment_destroy(sfft_experiment* experiment) { delete experiment; }

sfft_status sfft_experiment_set(sfft_experiment* experiment, const char* name, const char* value) {
  SFFT_REQUIRE(experiment && name && value, "null argument");
  return guarded([&] {
    sfft::ExperimentSpec s = experiment->spec;
    sfft::set_spec_param(s, name, value);
    sfft::validate_spec(s);
    experiment->spec = s;
  });
}

sfft_status sfft_experiment_run(const sfft_experiment* experiment, int threads, const char* csv_path, const char* json_path) {
  SFFT_REQUIRE(experiment, "null experiment");
  return guarded([&] {
    const auto records = sfft::run_experiment(experiment->spec, threads);
    std::ostringstream csv;
    sfft::write_csv(csv, records);
    if (csv_path) sfft::write_file(csv_path, csv.str());
    else std::cout << csv.str() << std::flush;
    if (json_path) sfft::write_file(json_path, sfft::sidecar_json(experiment->spec, records).dump(2) + "\n");
  });
}

sfft_status sfft_experiment_sweep(const sfft_experiment* experiment, const char* param, const char* values, int threads, const char* tidy_csv_path) {
  SFFT_REQUIRE(experiment && param && values, "null argument");
  return guarded([&] {
    std::vector<std::string> list;
    std::stringstream ss(values);
    std::string v;
    while (std::getline(ss, v, ','))
      if (!v.empty()) list.push_back(v);
    if (list.empty()) throw sfft::ParameterError("no sweep values");
    const auto points = sfft::run_sweep(experiment->spec, param, list, threads);
    std::ostringstream out;
    sfft::write_tidy_csv(out, param, points);
    if (tidy_csv_path) sfft::write_file(tidy_csv_path, out.str());
    else std::cout << out.str() << std::flush;
  });
}

sfft_status sfft_dump_measurements(const sfft_signal* spectrum, const sfft_params* params, const char* path) {
  SFFT_REQUIRE(spectrum && params && path, "null argument");
  return guarded([&] {
    const sfft::RecoveryParams p = sfft::complete_params(spectrum->xhat.grid, to_params(*params));
    sfft::SampleAccess access(spectrum->xhat);
    sfft::Rng rng(p.seed);
    const sfft::MeasurementSet m = sfft::acquire_measurements(access, p, rng);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sfft::IoError(std::string("cannot open ") + path + " for writing");
    sfft::write_measurements(m, out);
  });
}

}  // extern "C"
