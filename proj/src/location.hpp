#pragma once

#include <vector>

#include "core.hpp"
#include "hashing.hpp"

namespace sfft {

struct LocationResult {
  std::vector<GridIndex> found;      // distinct locations, sorted
  std::vector<std::uint8_t> failed;  // one flag per bucket of [b]^d
};

// Decodes one location per bucket of hashing r from the stored tables, which
// must already describe the current residual.
LocationResult locate_signal(const MeasurementSet& mset, int r, const Tuning& tuning = {});

// Number of probes voting for each candidate digit at group g (1-based) of
// coordinate s, given the digits f_s already decoded below that group.
std::vector<int> digit_votes(const MeasurementSet& mset, int r, std::uint64_t bucket, int s, int g, std::int64_t f_s, const Tuning& tuning = {});

}  // namespace sfft
