#include "filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "dense_dft.hpp"

namespace sfft {

BucketFilter::BucketFilter(std::int64_t n, int d, std::int64_t b, int F) : n_(n), d_(d), b_(b), F_(F) {
  if (d < 1 || d > kMaxDim) throw DimensionError("dimension must be in [1, 4]");
  if (F < 2 || F % 2 != 0) throw ParameterError("filter sharpness F must be even");
  if (F < 2 * d) throw ParameterError("filter sharpness F must be >= 2d");
  if (!is_power_of_two(static_cast<std::uint64_t>(n))) throw ParameterError("n must be a power of two");
  if (!is_power_of_two(static_cast<std::uint64_t>(b)) || b < 4) throw ParameterError("bucket side b must be a power of two >= 4");
  if (b > n) throw ParameterError("bucket side b must not exceed n");
  M_ = b / 4;

  // F-fold convolution of the normalized box 1/(2M+1) on [-M, M].
  const std::size_t width = static_cast<std::size_t>(2 * M_ + 1);
  std::vector<double> p(width, 1.0 / static_cast<double>(width));
  for (int f = 1; f < F; ++f) {
    std::vector<double> q(p.size() + width - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < width; ++j) q[i + j] += p[i] / static_cast<double>(width);
    p = std::move(q);
  }
  const std::int64_t reach = static_cast<std::int64_t>(F) * M_;
  const double scale = std::sqrt(static_cast<double>(n));
  freq_dense_.assign(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t m = -reach; m <= reach; ++m) freq_dense_[static_cast<std::size_t>(mod(m, n))] += scale * p[static_cast<std::size_t>(m + reach)];
  if (2 * reach + 1 <= n) {
    half_width_ = reach;
    for (std::int64_t m = -reach; m <= reach; ++m) freq_.emplace_back(m, freq_dense_[static_cast<std::size_t>(mod(m, n))]);
  } else {
    half_width_ = n / 2;
    for (std::int64_t m = -n / 2; m < n / 2; ++m) freq_.emplace_back(m, freq_dense_[static_cast<std::size_t>(mod(m, n))]);
  }
}

double BucketFilter::time_1d(std::int64_t j) const {
  const std::int64_t s = signed_residue(j, n_);
  if (s == 0) return 1.0;
  const double w = static_cast<double>(2 * M_ + 1);
  const double theta = kPi * static_cast<double>(s) / static_cast<double>(n_);
  const double D = std::sin(w * theta) / (w * std::sin(theta));
  return std::pow(D, F_);
}

double BucketFilter::time(const GridIndex& j) const {
  double g = 1.0;
  for (int s = 0; s < d_; ++s) g *= time_1d(j[s]);
  return g;
}

double BucketFilter::freq(const GridIndex& m) const {
  double g = 1.0;
  for (int s = 0; s < d_; ++s) {
    const std::int64_t off = signed_residue(m[s], n_);
    if (2 * half_width_ + 1 <= n_ && std::abs(off) > half_width_) return 0.0;
    g *= freq_dense_[static_cast<std::size_t>(mod(m[s], n_))];
  }
  return g;
}

namespace {

// 1-D Gaussian-smoothed box with edges at +-3b/4; z = (b/4) / (sqrt(2) sigma).
double smoothed_box(double xi, double b, double z) {
  const double e = 0.75 * b;
  const double s = std::sqrt(2.0) * (0.25 * b / (std::sqrt(2.0) * z));
  const double a = std::abs(xi);
  if (a <= e) return 1.0 - 0.5 * std::erfc((e - a) / s) - 0.5 * std::erfc((e + a) / s);
  return 0.5 * std::erfc((a - e) / s) - 0.5 * std::erfc((a + e) / s);
}

}  // namespace

FlatWindow::FlatWindow(std::int64_t n, int d, std::int64_t b, double c) : n_(n), d_(d), b_(b), c_(c) {
  if (d < 1 || d > kMaxDim) throw DimensionError("dimension must be in [1, 4]");
  if (!is_power_of_two(static_cast<std::uint64_t>(n))) throw ParameterError("n must be a power of two");
  if (!is_power_of_two(static_cast<std::uint64_t>(b)) || b < 2 || 2 * b > n)
    throw ParameterError("flat window needs b a power of two with 2 <= b <= n/2");
  if (!(c >= 1.0)) throw ParameterError("precision c must be >= 1");

  const double N = std::pow(static_cast<double>(n), d);
  target_ = std::pow(N, -c);
  time_.assign(static_cast<std::size_t>(n), 0.0);
  freq_.assign(static_cast<std::size_t>(n), 1.0);
  if (is_identity()) {
    time_[0] = 1.0;
    radius_ = 0;
    achieved_ = 0.0;
    return;
  }

  // Per-axis budget so that the d-fold tensor product meets the target.
  const double ideal_norm = std::sqrt(2.0 * static_cast<double>(b) + 1.0);
  const double per_axis = std::max(target_ / (d * std::pow(ideal_norm + 1.0, d - 1)), 1e-15);
  const std::size_t un = static_cast<std::size_t>(n);
  const double bd = static_cast<double>(b);

  double best = INFINITY;
  for (double z = 1.0; z <= 12.0; z += 0.25) {
    std::vector<cplx> spec(un);
    for (std::int64_t i = 0; i < n; ++i) spec[static_cast<std::size_t>(i)] = smoothed_box(static_cast<double>(signed_residue(i, n)), bd, z);
    fft_1d(spec, +1);
    std::vector<double> w(un);
    for (std::size_t i = 0; i < un; ++i) w[i] = spec[i].real() / static_cast<double>(n);

    // Smallest radius whose discarded tail moves Ghat by at most per_axis / 2.
    std::int64_t radius = n / 2;
    double tail = 0.0;
    for (std::int64_t r = n / 2; r >= 1; --r) {
      double add = w[static_cast<std::size_t>(mod(r, n))] * w[static_cast<std::size_t>(mod(r, n))];
      if (r != n / 2) add += w[static_cast<std::size_t>(mod(-r, n))] * w[static_cast<std::size_t>(mod(-r, n))];
      if (std::sqrt(static_cast<double>(n) * (tail + add)) > per_axis / 2) break;
      tail += add;
      radius = r - 1;
    }
    std::vector<double> wt(un, 0.0);
    for (std::int64_t p = -std::min(radius, n / 2 - 1); p <= std::min(radius, n / 2 - 1); ++p) wt[static_cast<std::size_t>(mod(p, n))] = w[static_cast<std::size_t>(mod(p, n))];
    if (radius >= n / 2) wt[un / 2] = w[un / 2];

    std::vector<cplx> f(wt.begin(), wt.end());
    fft_1d(f, -1);
    std::vector<double> fr(un);
    for (std::size_t i = 0; i < un; ++i) fr[i] = f[i].real();

    time_ = wt;
    freq_ = fr;
    radius_ = radius;
    double err2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) err2 += std::norm(f[static_cast<std::size_t>(i)] - ideal_1d(i));
    const double e1 = std::sqrt(err2);
    best = e1;
    if (e1 <= per_axis) break;
  }
  achieved_ = d * best * std::pow(ideal_norm + best, d - 1);
}

double FlatWindow::ideal_1d(std::int64_t i) const {
  const std::int64_t a = std::abs(signed_residue(i, n_));
  if (2 * a <= b_) return 1.0;
  if (a > b_) return 0.0;
  return std::clamp(freq_[static_cast<std::size_t>(mod(i, n_))], 0.0, 1.0);
}

double FlatWindow::time(const GridIndex& p) const {
  double g = 1.0;
  for (int s = 0; s < d_; ++s) g *= time_1d(p[s]);
  return g;
}

double FlatWindow::freq(const GridIndex& i) const {
  double g = 1.0;
  for (int s = 0; s < d_; ++s) g *= freq_1d(i[s]);
  return g;
}

double FlatWindow::ideal(const GridIndex& i) const {
  double g = 1.0;
  for (int s = 0; s < d_; ++s) g *= ideal_1d(i[s]);
  return g;
}

std::shared_ptr<const BucketFilter> build_bucket_filter(std::int64_t n, int d, std::uint64_t B, int F) {
  static std::mutex lock;
  static std::map<std::tuple<std::int64_t, int, std::uint64_t, int>, std::shared_ptr<const BucketFilter>> cache;
  const auto key = std::make_tuple(n, d, B, F);
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const std::int64_t b = bucket_side(Grid(n, d), B);
  auto f = std::make_shared<const BucketFilter>(n, d, b, F);
  cache.emplace(key, f);
  return f;
}

std::shared_ptr<const FlatWindow> build_flat_window(std::int64_t n, int d, std::int64_t b, double c) {
  static std::mutex lock;
  static std::map<std::tuple<std::int64_t, int, std::int64_t, double>, std::shared_ptr<const FlatWindow>> cache;
  const auto key = std::make_tuple(n, d, b, c);
  std::lock_guard<std::mutex> guard(lock);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto w = std::make_shared<const FlatWindow>(n, d, b, c);
  cache.emplace(key, w);
  return w;
}

}  // namespace sfft
