#include "core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace sfft {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::uint64_t v) {
  if (!is_power_of_two(v)) throw ParameterError("value is not a power of two: " + std::to_string(v));
  return std::countr_zero(v);
}

std::uint64_t ceil_power_of_two(std::uint64_t v) { return v <= 1 ? 1 : std::bit_ceil(v); }

std::uint64_t pow_u64(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

GridIndex::GridIndex(std::initializer_list<std::int64_t> coords) : d(static_cast<int>(coords.size())) {
  if (d > kMaxDim) throw DimensionError("too many coordinates");
  std::copy(coords.begin(), coords.end(), c.begin());
}

Grid::Grid(std::int64_t side, int dim) : n(side), d(dim) {
  if (dim < 1 || dim > kMaxDim) throw DimensionError("dimension must be in [1, 4]");
  if (side < 2 || !is_power_of_two(static_cast<std::uint64_t>(side)))
    throw ParameterError("side length must be a power of two >= 2, got " + std::to_string(side));
  if (side > (std::int64_t{1} << 30) || log2_exact(static_cast<std::uint64_t>(side)) * dim > 40)
    throw ParameterError("grid too large");
}

std::uint64_t Grid::size() const { return pow_u64(static_cast<std::uint64_t>(n), d); }

GridIndex Grid::unit(int s) const {
  GridIndex e(d);
  e[s] = 1;
  return e;
}

void Grid::check_same(const GridIndex& i) const {
  if (i.d != d) throw DimensionError("index dimension " + std::to_string(i.d) + " does not match grid dimension " + std::to_string(d));
}

GridIndex Grid::wrap(const GridIndex& i) const {
  check_same(i);
  GridIndex r(d);
  for (int s = 0; s < d; ++s) r[s] = mod(i[s], n);
  return r;
}

GridIndex Grid::add(const GridIndex& a, const GridIndex& b) const {
  check_same(a);
  check_same(b);
  GridIndex r(d);
  for (int s = 0; s < d; ++s) r[s] = mod(a[s] + b[s], n);
  return r;
}

GridIndex Grid::sub(const GridIndex& a, const GridIndex& b) const {
  check_same(a);
  check_same(b);
  GridIndex r(d);
  for (int s = 0; s < d; ++s) r[s] = mod(a[s] - b[s], n);
  return r;
}

GridIndex Grid::neg(const GridIndex& a) const {
  check_same(a);
  GridIndex r(d);
  for (int s = 0; s < d; ++s) r[s] = mod(-a[s], n);
  return r;
}

GridIndex Grid::scale(const GridIndex& a, std::int64_t f) const {
  check_same(a);
  GridIndex r(d);
  for (int s = 0; s < d; ++s) r[s] = mod(mod(a[s], n) * mod(f, n), n);
  return r;
}

std::int64_t Grid::dot(const GridIndex& a, const GridIndex& b) const {
  check_same(a);
  check_same(b);
  std::int64_t acc = 0;
  for (int s = 0; s < d; ++s) acc = mod(acc + mod(a[s], n) * mod(b[s], n), n);
  return acc;
}

std::int64_t Grid::circular_norm_inf(const GridIndex& a) const {
  check_same(a);
  std::int64_t m = 0;
  for (int s = 0; s < d; ++s) {
    std::int64_t r = mod(a[s], n);
    m = std::max(m, std::min(r, n - r));
  }
  return m;
}

std::uint64_t Grid::flat(const GridIndex& i) const {
  check_same(i);
  std::uint64_t f = 0;
  for (int s = 0; s < d; ++s) f = f * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(mod(i[s], n));
  return f;
}

GridIndex Grid::index(std::uint64_t f) const {
  GridIndex r(d);
  for (int s = d - 1; s >= 0; --s) {
    r[s] = static_cast<std::int64_t>(f % static_cast<std::uint64_t>(n));
    f /= static_cast<std::uint64_t>(n);
  }
  return r;
}

DenseSignal::DenseSignal(const Grid& g, Domain dom) : grid(g), domain(dom), values(g.size()) {}

DenseSignal::DenseSignal(const Grid& g, Domain dom, std::vector<cplx> v) : grid(g), domain(dom), values(std::move(v)) {
  if (values.size() != grid.size()) throw DimensionError("signal length does not match n^d");
}

double DenseSignal::norm2() const {
  double s = 0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s);
}

void SparseApprox::set(std::uint64_t flat, cplx v) {
  if (v == cplx(0.0, 0.0))
    entries.erase(flat);
  else
    entries[flat] = v;
}

void SparseApprox::add(std::uint64_t flat, cplx v) {
  auto it = entries.find(flat);
  if (it == entries.end()) {
    if (v != cplx(0.0, 0.0)) entries.emplace(flat, v);
    return;
  }
  it->second += v;
  if (it->second == cplx(0.0, 0.0)) entries.erase(it);
}

void SparseApprox::add(const SparseApprox& other) {
  if (other.grid != grid) throw DimensionError("sparse approximations live on different grids");
  for (const auto& [f, v] : other.entries) add(f, v);
}

cplx SparseApprox::get(std::uint64_t flat) const {
  auto it = entries.find(flat);
  return it == entries.end() ? cplx(0.0, 0.0) : it->second;
}

double SparseApprox::norm2() const {
  double s = 0;
  for (const auto& [f, v] : entries) s += std::norm(v);
  return std::sqrt(s);
}

double SparseApprox::norm1() const {
  double s = 0;
  for (const auto& [f, v] : entries) s += std::abs(v);
  return s;
}

void SparseApprox::drop_at_most(double threshold) {
  std::erase_if(entries, [threshold](const auto& kv) { return std::abs(kv.second) <= threshold; });
}

DenseSignal SparseApprox::to_dense(Domain dom) const {
  DenseSignal x(grid, dom);
  for (const auto& [f, v] : entries) x.values[f] = v;
  return x;
}

SparseApprox SparseApprox::from_dense(const DenseSignal& x) {
  SparseApprox s(x.grid);
  for (std::uint64_t f = 0; f < x.values.size(); ++f)
    if (x.values[f] != cplx(0.0, 0.0)) s.entries.emplace(f, x.values[f]);
  return s;
}

SparseApprox operator+(const SparseApprox& a, const SparseApprox& b) {
  SparseApprox r = a;
  r.add(b);
  return r;
}

GridIndex star(const Grid& grid, const ProbePair& p1, const ProbePair& p2) {
  for (const auto* g : {&p1.alpha, &p1.beta, &p2.alpha, &p2.beta}) grid.check_same(*g);
  GridIndex r(grid.d);
  const std::int64_t n = grid.n;
  for (int s = 0; s < grid.d; ++s)
    r[s] = mod(mod(p1.alpha[s], n) * mod(p2.alpha[s], n) + mod(p1.beta[s], n) * mod(p2.beta[s], n), n);
  return r;
}

double loglog2(double N) { return std::log2(std::max(2.0, std::log2(N))); }

std::int64_t bucket_side_for(const Grid& grid, double target) {
  std::int64_t b = 4;
  while (b < grid.n && std::pow(static_cast<double>(b), grid.d) < target) b *= 2;
  return std::min<std::int64_t>(b, grid.n);
}

std::int64_t bucket_side(const Grid& grid, std::uint64_t B) {
  for (std::int64_t b = 1; b <= grid.n; b *= 2)
    if (pow_u64(static_cast<std::uint64_t>(b), grid.d) == B) return b;
  throw ParameterError("bucket count " + std::to_string(B) + " is not b^d for a power of two b <= n");
}

RecoveryParams complete_params(const Grid& grid, RecoveryParams p) {
  const double N = static_cast<double>(grid.size());
  const double a = p.tuning.alpha;
  if (p.F == 0) p.F = 2 * grid.d;
  if (p.B == 0) {
    std::int64_t b = bucket_side_for(grid, p.tuning.location_bucket_factor * static_cast<double>(p.k) / std::pow(a, grid.d));
    p.B = pow_u64(static_cast<std::uint64_t>(b), grid.d);
  }
  const int reps = static_cast<int>(std::ceil(p.tuning.location_repetition_constant * loglog2(N) / std::sqrt(a)));
  if (p.r_max == 0) p.r_max = std::max(1, reps);
  if (p.c_max == 0) p.c_max = std::max(1, reps);
  if (p.T == 0) {
    const double base = std::pow(std::log2(N), 4.0);
    const double t = std::ceil(std::log(std::max(p.r_star, 1.0)) / std::log(base) - 1e-12);
    p.T = std::max(1, static_cast<int>(t));
  }
  return p;
}

void validate_params(const Grid& grid, const RecoveryParams& p) {
  if (p.k < 1) throw ParameterError("k must be >= 1");
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) throw ParameterError("epsilon must be in (0, 1]");
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw ParameterError("mu must be positive and finite");
  if (!(p.r_star >= 1.0)) throw ParameterError("r_star must be >= 1");
  if (!(p.tuning.alpha > 0.0 && p.tuning.alpha < 1.0)) throw ParameterError("alpha must be in (0, 1)");
  if (p.F % 2 != 0 || p.F < 2 * grid.d) throw ParameterError("F must be even and >= 2d");
  const std::int64_t b = bucket_side(grid, p.B);
  if (b < 4) throw ParameterError("bucket side must be at least 4");
  if (p.B < p.k) throw ParameterError("B must be >= k");
  if (p.r_max < 1 || p.c_max < 1) throw ParameterError("r_max and c_max must be >= 1");
  if (p.T < 1) throw ParameterError("T must be >= 1");
  if (!(p.tuning.precision_c >= 2.0)) throw ParameterError("precision c must be >= 2");
}

}  // namespace sfft
