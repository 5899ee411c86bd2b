#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "core.hpp"

namespace sfft {

// Bucketing filter with b^d buckets and sharpness F.
// In 1-D, G_j = D(j)^F where D is the Dirichlet kernel of a width 2M+1 box
// (M = b/4), so Ghat is the F-fold self convolution of that box.
class BucketFilter {
 public:
  BucketFilter(std::int64_t n, int d, std::int64_t b, int F);

  std::int64_t n() const { return n_; }
  int d() const { return d_; }
  std::int64_t b() const { return b_; }
  std::uint64_t B() const { return pow_u64(static_cast<std::uint64_t>(b_), d_); }
  int F() const { return F_; }
  std::int64_t box_half_width() const { return M_; }

  // G at a 1-D offset (any integer, read mod n).
  double time_1d(std::int64_t j) const;
  double time(const GridIndex& j) const;

  // 1-D frequency support: signed offsets and their values. Values carry the
  // sqrt(n) factor of the orthonormal transform, so the d-fold product is Ghat.
  const std::vector<std::pair<std::int64_t, double>>& freq_1d() const { return freq_; }
  double freq(const GridIndex& m) const;
  // Largest |offset| in the 1-D support.
  std::int64_t freq_half_width() const { return half_width_; }
  std::uint64_t support_size() const { return pow_u64(freq_.size(), d_); }

 private:
  std::int64_t n_;
  int d_;
  std::int64_t b_;
  int F_;
  std::int64_t M_;
  std::int64_t half_width_;
  std::vector<std::pair<std::int64_t, double>> freq_;
  std::vector<double> freq_dense_;
};

// Flat window for the semi-equispaced transform. The transform Ghat (unnormalized,
// Ghat_i = sum_p G_p omega^{-ip}) is ~1 on |i| <= b/2 and ~0 on |i| > b.
class FlatWindow {
 public:
  FlatWindow(std::int64_t n, int d, std::int64_t b, double c);

  std::int64_t n() const { return n_; }
  int d() const { return d_; }
  std::int64_t b() const { return b_; }
  double c() const { return c_; }
  // Time support is |p| <= radius (circular); radius >= n/2 means no truncation.
  std::int64_t radius() const { return radius_; }
  bool is_identity() const { return 2 * b_ == n_; }

  double time_1d(std::int64_t p) const { return time_[static_cast<std::size_t>(mod(p, n_))]; }
  double freq_1d(std::int64_t i) const { return freq_[static_cast<std::size_t>(mod(i, n_))]; }
  double ideal_1d(std::int64_t i) const;
  double time(const GridIndex& p) const;
  double freq(const GridIndex& i) const;
  double ideal(const GridIndex& i) const;

  // Requested bound on ||Ghat - Ghat'||_2 over [n]^d, and the bound actually met.
  double target_error() const { return target_; }
  double achieved_error() const { return achieved_; }

 private:
  std::int64_t n_;
  int d_;
  std::int64_t b_;
  double c_;
  std::int64_t radius_ = 0;
  double target_ = 0;
  double achieved_ = 0;
  std::vector<double> time_;
  std::vector<double> freq_;
};

std::shared_ptr<const BucketFilter> build_bucket_filter(std::int64_t n, int d, std::uint64_t B, int F);
std::shared_ptr<const FlatWindow> build_flat_window(std::int64_t n, int d, std::int64_t b, double c);

}  // namespace sfft
