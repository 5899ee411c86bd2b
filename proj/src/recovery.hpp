#pragma once

#include <vector>

#include "core.hpp"
#include "hashing.hpp"
#include "rng.hpp"

namespace sfft {

struct SampleReport {
  std::uint64_t location = 0;
  std::uint64_t estimation = 0;
  std::uint64_t inf_norm = 0;
  std::uint64_t const_snr = 0;
  std::uint64_t total() const { return location + estimation + inf_norm + const_snr; }
};

struct RecoveryReport {
  SampleReport samples;
  int T = 0;
  int estimate_calls = 0;  // estimate_values calls made by the l1 loop
  int inf_norm_estimate_calls = 0;
  double ms_acquire = 0;
  double ms_l1 = 0;
  double ms_inf = 0;
  double ms_const_snr = 0;
  // Sum of |bucket| over the zero-shift tables, before each outer iteration and at the end.
  std::vector<double> residual_proxy;
};

// State of the outer loop of sparse_fft.
struct SnrLoopState {
  SparseApprox chi;
  int t = 0;
  double nu = 0;
};

double log4N(const Grid& grid);
int l1_inner_iterations(const Grid& grid);
int l1_estimation_repetitions(const Grid& grid, const RecoveryParams& p);
int log_repetitions(const Grid& grid, const Tuning& tuning);

// mset must describe x - chi on entry; on return it describes x - (returned value).
SparseApprox reduce_l1_norm(MeasurementSet& mset, SampleAccess& xhat, const SparseApprox& chi, const RecoveryParams& params, double nu, double mu, Rng& rng,
                            RecoveryReport* report = nullptr);

// Returns the correction chi^(T) for the residual x - chi.
SparseApprox reduce_inf_norm(SampleAccess& xhat, const SparseApprox& chi, std::uint64_t k_tilde, double nu, double r_star, double mu, const RecoveryParams& params,
                             Rng& rng, RecoveryReport* report = nullptr);

// Returns the correction chi' (top 4k estimates of the residual).
SparseApprox recover_at_constant_snr(SampleAccess& xhat, const SparseApprox& chi, std::uint64_t k, double epsilon, const RecoveryParams& params, Rng& rng,
                                     RecoveryReport* report = nullptr);

// Full recovery. params are completed with defaults and validated first.
SparseApprox sparse_fft(const DenseSignal& xhat, const RecoveryParams& params, RecoveryReport* report = nullptr);
SparseApprox sparse_fft(const DenseSignal& xhat, std::uint64_t k, double epsilon, double r_star, double mu, std::uint64_t seed);

}  // namespace sfft
