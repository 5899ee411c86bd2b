#pragma once

#include <map>
#include <vector>

#include "core.hpp"
#include "hashing.hpp"

namespace sfft {

// Noise seen by one element under one hashing.
struct HashingNoise {
  double gain = 0;    // G_{o_i(i)}
  double e_head = 0;  // G_{o_i(i)}^{-1} sum_{j != i} G_{o_i(j)} |y_j|, y = (x - chi)_S - chi_{not S}
  // Per shift w: quant^{1/5} over probes a of the tail term at a * (1, w).
  std::vector<double> e_tail_shift;
  double mu2 = 0;       // |G_{o_i(i)}^{-1}| sum_{j != i, j not in S} |x_j|^2 G_{o_i(j)}^2
  double e_tail = 0;    // 40 mu + sum_w |e_tail_shift[w] - 40 mu|_+
  std::vector<bool> isolated_at;  // one flag per scale t = 0..log2(b)
  bool isolated() const;
};

struct ElementNoise {
  std::vector<HashingNoise> per_hashing;
  double e_head = 0;  // quant^{1/5} over hashings
  double e_tail = 0;  // quant^{1/5} over hashings
  cplx residual;      // x_i - chi_i
};

struct NoiseProfile {
  std::map<std::uint64_t, ElementNoise> elements;  // keyed by flat index of i in S
  double e_head_total() const;
  double e_tail_total() const;
};

struct DiagnosticsOptions {
  double alpha = 0.5;
  // Rough operation budget: N * |S| * hashings * (probes * shifts + 1).
  double budget = 4e9;
};

// The tail term |G_{o_i(i)}^{-1} sum_{j not in S} G_{o_i(j)} x_j omega^{z^T Sigma (j - i)}|.
double tail_noise(const DenseSignal& x, const std::vector<bool>& in_S, const Hashing& h, const GridIndex& i, const GridIndex& z);

// Element i is isolated at scale t when the number of pi(S \ {i}) within circular
// l_inf distance (n/b) 2^t of (n/b) h(i) is at most (2 pi)^{-dF} alpha^{d/2} 2^{(t+1)d} 2^t.
std::vector<bool> isolation_by_scale(const Hashing& h, const std::vector<GridIndex>& S, const GridIndex& i, double alpha);

// x is the time-domain signal; S lists the head set.
NoiseProfile compute_noise_profile(const DenseSignal& x, const SparseApprox& chi, const std::vector<GridIndex>& S, const std::vector<Hashing>& hashings,
                                   const std::vector<std::vector<ProbePair>>& probes, const ShiftSchedule& shifts, const DiagnosticsOptions& opt = {});
NoiseProfile compute_noise_profile(const DenseSignal& x, const SparseApprox& chi, const std::vector<GridIndex>& S, const MeasurementSet& mset,
                                   const DiagnosticsOptions& opt = {});

// Hashing r meets the three sufficient conditions for i to be located: head noise
// and every shift's tail noise below |x'_i|/20, and probes balanced in every coordinate.
bool certifies_location(const NoiseProfile& profile, const Grid& grid, std::uint64_t i_flat, int r, const std::vector<ProbePair>& probes,
                        std::int64_t delta, double balance_fraction = 0.49);
// Any hashing certifies i. Returns its index or -1.
int certifying_hashing(const NoiseProfile& profile, const Grid& grid, std::uint64_t i_flat, const std::vector<std::vector<ProbePair>>& probes,
                       std::int64_t delta, double balance_fraction = 0.49);

}  // namespace sfft
