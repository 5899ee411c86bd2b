#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfft {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 4;
inline constexpr double kPi = 3.14159265358979323846;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_power_of_two(std::uint64_t v);
int log2_exact(std::uint64_t v);
// Smallest power of two that is >= v (v >= 1).
std::uint64_t ceil_power_of_two(std::uint64_t v);

// Residue in [0, n).
inline std::int64_t mod(std::int64_t v, std::int64_t n) {
  std::int64_t r = v % n;
  return r < 0 ? r + n : r;
}

// Signed residue in [-n/2, n/2).
inline std::int64_t signed_residue(std::int64_t v, std::int64_t n) {
  std::int64_t r = mod(v, n);
  return r >= n / 2 ? r - n : r;
}

struct GridIndex {
  std::array<std::int64_t, kMaxDim> c{};
  int d = 0;

  GridIndex() = default;
  explicit GridIndex(int dim) : d(dim) {}
  GridIndex(std::initializer_list<std::int64_t> coords);

  std::int64_t& operator[](int s) { return c[static_cast<std::size_t>(s)]; }
  std::int64_t operator[](int s) const { return c[static_cast<std::size_t>(s)]; }

  friend bool operator==(const GridIndex& a, const GridIndex& b) {
    if (a.d != b.d) return false;
    for (int s = 0; s < a.d; ++s)
      if (a[s] != b[s]) return false;
    return true;
  }
  friend bool operator<(const GridIndex& a, const GridIndex& b) {
    if (a.d != b.d) return a.d < b.d;
    for (int s = 0; s < a.d; ++s)
      if (a[s] != b[s]) return a[s] < b[s];
    return false;
  }
};

// The cube [n]^d with n a power of two. Coordinates are kept as residues.
struct Grid {
  std::int64_t n = 0;
  int d = 0;

  Grid() = default;
  Grid(std::int64_t side, int dim);

  std::uint64_t size() const;
  int log2n() const { return log2_exact(static_cast<std::uint64_t>(n)); }
  // log2 of N = n^d.
  int log2N() const { return d * log2n(); }

  GridIndex zero() const { return GridIndex(d); }
  GridIndex unit(int s) const;
  GridIndex wrap(const GridIndex& i) const;
  GridIndex add(const GridIndex& a, const GridIndex& b) const;
  GridIndex sub(const GridIndex& a, const GridIndex& b) const;
  GridIndex neg(const GridIndex& a) const;
  GridIndex scale(const GridIndex& a, std::int64_t f) const;
  // a^T b mod n
  std::int64_t dot(const GridIndex& a, const GridIndex& b) const;
  // max_s min(r_s, n - r_s)
  std::int64_t circular_norm_inf(const GridIndex& a) const;

  std::uint64_t flat(const GridIndex& i) const;
  GridIndex index(std::uint64_t flat) const;

  void check_same(const GridIndex& i) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.n == b.n && a.d == b.d; }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }
};

enum class Domain { time, frequency };

struct DenseSignal {
  Grid grid;
  Domain domain = Domain::time;
  std::vector<cplx> values;

  DenseSignal() = default;
  DenseSignal(const Grid& g, Domain dom);
  DenseSignal(const Grid& g, Domain dom, std::vector<cplx> v);

  cplx& at(const GridIndex& i) { return values[grid.flat(i)]; }
  cplx at(const GridIndex& i) const { return values[grid.flat(i)]; }
  double norm2() const;
};

// Sparse map from flat grid index to value. Exact zeros are never stored.
struct SparseApprox {
  Grid grid;
  std::map<std::uint64_t, cplx> entries;

  SparseApprox() = default;
  explicit SparseApprox(const Grid& g) : grid(g) {}

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  void set(std::uint64_t flat, cplx v);
  void add(std::uint64_t flat, cplx v);
  void add(const SparseApprox& other);
  cplx get(std::uint64_t flat) const;
  double norm2() const;
  double norm1() const;
  void drop_at_most(double threshold);
  DenseSignal to_dense(Domain dom = Domain::time) const;
  static SparseApprox from_dense(const DenseSignal& x);
};

SparseApprox operator+(const SparseApprox& a, const SparseApprox& b);

struct ProbePair {
  GridIndex alpha;
  GridIndex beta;
};

// gamma_s = a1_s * a2_s + b1_s * b2_s mod n
GridIndex star(const Grid& grid, const ProbePair& p1, const ProbePair& p2);

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// Knobs that the theory leaves as "sufficiently large" constants.
struct Tuning {
  double alpha = 0.5;
  // Location B is the smallest power of 2^d with B >= factor * k / alpha^d.
  double location_bucket_factor = 8.0;
  // r_max = c_max = ceil(C * loglogN / sqrt(alpha)).
  double location_repetition_constant = 2.0;
  // Estimation repetitions inside the l1 loop: ceil(C * (loglogN + d^2 + log2(B/k))).
  double estimation_repetition_constant = 1.0;
  // Repetitions for the inf-norm and constant-SNR estimators: ceil(C * log2 N).
  double log_repetition_constant = 1.0;
  // Hashings acquired by the inf-norm stage: ceil(C * log2 N / sqrt(alpha)).
  double inf_norm_repetition_constant = 0.5;
  // Constant-SNR stage B is the smallest power of 2^d with B >= factor * k / (epsilon alpha^d).
  double const_snr_bucket_factor = 4.0;
  double l1_threshold_fraction = 1e-3;
  double balance_fraction = 0.49;
  // Redraw probe sets that fail the balance test before sampling.
  bool redraw_unbalanced_probes = true;
  double vote_fraction = 0.6;
  double ratio_tolerance = 1.0 / 3.0;
  double reference_floor = 1e-12;
  double precision_c = 3.0;
  double divergence_factor = 10.0;
  // Output entries with |v| <= factor * mu are dropped at the end.
  double zero_drop_factor = 1.0;
  // Bucket count for estimate_values; 0 means derived from k, epsilon, alpha.
  std::uint64_t estimation_buckets = 0;
};

struct RecoveryParams {
  std::uint64_t k = 1;
  double epsilon = 0.5;
  double mu = 0.0;
  double r_star = 2.0;
  int F = 0;
  std::uint64_t B = 0;
  int r_max = 0;
  int c_max = 0;
  int T = 0;
  std::uint64_t seed = 0;
  Tuning tuning;
};

double loglog2(double N);
// Smallest b (power of two, 4 <= b <= n) with b^d >= target.
std::int64_t bucket_side_for(const Grid& grid, double target);
std::int64_t bucket_side(const Grid& grid, std::uint64_t B);
std::uint64_t pow_u64(std::uint64_t base, int e);

// Fills every zero field of params with its default for this grid.
RecoveryParams complete_params(const Grid& grid, RecoveryParams params);
void validate_params(const Grid& grid, const RecoveryParams& params);

}  // namespace sfft
