#pragma once

#include <iosfwd>
#include <vector>

#include "core.hpp"
#include "permutation.hpp"
#include "rng.hpp"

namespace sfft {

// Read access to the sampled spectrum that counts every access.
class SampleAccess {
 public:
  explicit SampleAccess(const DenseSignal& xhat) : xhat_(&xhat) {}

  cplx operator()(std::uint64_t flat) {
    ++count_;
    return xhat_->values[flat];
  }
  const Grid& grid() const { return xhat_->grid; }
  std::uint64_t count() const { return count_; }

 private:
  const DenseSignal* xhat_;
  std::uint64_t count_ = 0;
};

// Bucket values u_j = sum_l G_{(n/b) j - pi(l)} (x - chi)_l omega^{a^T Sigma l}, j in [b]^d,
// from |supp Ghat| samples of xhat. chi is subtracted through the semi-equispaced
// transform when its window fits, otherwise by direct summation.
std::vector<cplx> hash_to_bins(SampleAccess& xhat, const SparseApprox& chi, const Hashing& h, const GridIndex& a, double c);

// True when hash_to_bins evaluates chi's spectrum with the semi-equispaced transform.
bool subtracts_via_semi_equispaced(const Hashing& h);

// Digit schedule for location: radix Delta for every group except the last,
// whose radix n / Delta^{G-1} keeps the last shift equal to one.
struct ShiftSchedule {
  std::int64_t delta = 0;
  int groups = 0;
  std::vector<std::int64_t> radix;       // radix[g-1] for g = 1..groups
  std::vector<std::int64_t> cumulative;  // P_g = radix_1 * ... * radix_g
  std::vector<GridIndex> shifts;         // shifts[0] is zero
  int index(int s, int g) const { return 1 + s * groups + (g - 1); }
};

// Delta = 2^floor(log2(log2 n)/2), raised to 2 when that gives 1.
std::int64_t location_delta(std::int64_t n);
ShiftSchedule make_shift_schedule(const Grid& grid);

struct MeasurementSet {
  Grid grid;
  std::int64_t b = 0;
  std::uint64_t B = 0;
  int F = 0;
  int r_max = 0;
  int c_max = 0;
  double c = 3.0;
  std::uint64_t seed = 0;
  std::vector<Hashing> hashings;
  std::vector<std::vector<ProbePair>> probes;
  ShiftSchedule shifts;
  std::vector<cplx> buckets;
  std::uint64_t sample_counter = 0;

  std::size_t table_offset(int r, int a, int w) const {
    const std::size_t W = shifts.shifts.size();
    return ((static_cast<std::size_t>(r) * static_cast<std::size_t>(c_max) + static_cast<std::size_t>(a)) * W + static_cast<std::size_t>(w)) * B;
  }
  const cplx* table(int r, int a, int w) const { return buckets.data() + table_offset(r, a, w); }
  cplx* table(int r, int a, int w) { return buckets.data() + table_offset(r, a, w); }
  // The evaluation point a * (1, w) = alpha + beta o w.
  GridIndex probe_point(int r, int a, int w) const;
};

// True iff for every r = 1..Delta-1 at least `fraction` of omega_Delta^{r beta_s}
// have non-positive real part.
bool check_balanced(const Grid& grid, const std::vector<ProbePair>& probes, int s, std::int64_t delta, double fraction = 0.49);

// With balance_fraction > 0, a probe set failing check_balanced on some coordinate is
// redrawn (up to 64 times) before any sample is taken.
MeasurementSet acquire_measurements(SampleAccess& xhat, std::uint64_t B, int F, int r_max, int c_max, double c, Rng& rng,
                                    double balance_fraction = 0.0);
MeasurementSet acquire_measurements(SampleAccess& xhat, const RecoveryParams& params, Rng& rng);

// Subtracts the hashed contribution of chi_delta from every table. No samples.
void update_residual_measurements(MeasurementSet& mset, const SparseApprox& chi_delta);

// Binary dump: "SFFTMSET", u32 version, u64 n, u32 d, u64 B, u32 F, u32 r_max,
// u32 c_max, u64 seed, u32 shift count, then complex64 tables, little endian.
struct MeasurementDump {
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  std::uint32_t d = 0;
  std::uint64_t B = 0;
  std::uint32_t F = 0;
  std::uint32_t r_max = 0;
  std::uint32_t c_max = 0;
  std::uint64_t seed = 0;
  std::uint32_t shift_count = 0;
  std::vector<std::complex<float>> buckets;
};

void write_measurements(const MeasurementSet& mset, std::ostream& out);
MeasurementDump read_measurements(std::istream& in);

}  // namespace sfft
