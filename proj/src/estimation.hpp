#pragma once

#include <map>
#include <vector>

#include "core.hpp"
#include "hashing.hpp"
#include "rng.hpp"

namespace sfft {

// Median of real parts + i * median of imaginary parts. The median of s values
// is the element at sorted position floor(s/2).
cplx coordinatewise_median(std::vector<cplx> values);

// The ceil(gamma * s)-th largest value.
double quantile(std::vector<double> values, double gamma);

struct EstimateBatch {
  std::map<std::uint64_t, cplx> estimates;
  SparseApprox kept;
  std::uint64_t samples = 0;
};

// Bucket count used by estimate_values: smallest b^d >= k / (epsilon alpha^{2d}).
std::uint64_t estimation_buckets(const Grid& grid, std::uint64_t k, double epsilon, const Tuning& tuning);

// Median over `repetitions` fresh hashings of the residual x - chi at each location
// of L; keeps the estimates with |w| > nu.
EstimateBatch estimate_values(SampleAccess& xhat, const SparseApprox& chi, const std::vector<GridIndex>& L, std::uint64_t k, double epsilon, double nu,
                              int repetitions, const Tuning& tuning, Rng& rng);

}  // namespace sfft
