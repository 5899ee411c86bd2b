#include "location.hpp"

#include <cmath>
#include <set>

#include "dense_dft.hpp"

namespace sfft {

namespace {

int votes_needed(double fraction, int probes) { return static_cast<int>(std::ceil(fraction * probes - 1e-9)); }

}  // namespace

std::vector<int> digit_votes(const MeasurementSet& m, int r, std::uint64_t bucket, int s, int g, std::int64_t f_s, const Tuning& tuning) {
  const ShiftSchedule& sch = m.shifts;
  const std::int64_t rad = sch.radix[static_cast<std::size_t>(g - 1)];
  const std::int64_t P = sch.cumulative[static_cast<std::size_t>(g - 1)];
  const std::int64_t step = P / rad;
  const int w = sch.index(s, g);
  std::vector<int> votes(static_cast<std::size_t>(rad), 0);
  const std::vector<cplx>& roots = roots_of_unity(P);
  const double floor2 = tuning.reference_floor * tuning.reference_floor;
  const double tol2 = tuning.ratio_tolerance * tuning.ratio_tolerance;
  for (int a = 0; a < m.c_max; ++a) {
    const cplx ref = m.table(r, a, 0)[bucket];
    const double ref2 = std::norm(ref);
    if (ref2 < floor2) continue;
    // |root * v / ref - 1| < tol  <=>  |root * v - ref|^2 < tol^2 |ref|^2
    const cplx v = m.table(r, a, w)[bucket];
    const double bound = tol2 * ref2;
    const std::int64_t beta = mod(m.probes[static_cast<std::size_t>(r)][static_cast<std::size_t>(a)].beta[s], P);
    for (std::int64_t digit = 0; digit < rad; ++digit) {
      const std::int64_t e = mod(-mod((digit * step + f_s) % P * beta, P), P);
      if (std::norm(roots[static_cast<std::size_t>(e)] * v - ref) < bound) ++votes[static_cast<std::size_t>(digit)];
    }
  }
  return votes;
}

LocationResult locate_signal(const MeasurementSet& m, int r, const Tuning& tuning) {
  if (r < 0 || r >= m.r_max) throw ParameterError("hashing index out of range");
  const Grid& g = m.grid;
  const ShiftSchedule& sch = m.shifts;
  const Hashing& h = m.hashings[static_cast<std::size_t>(r)];
  const int needed = votes_needed(tuning.vote_fraction, m.c_max);
  LocationResult res;
  res.failed.assign(m.B, 0);
  std::set<std::uint64_t> found;
  for (std::uint64_t j = 0; j < m.B; ++j) {
    GridIndex f(g.d);
    bool ok = true;
    for (int s = 0; s < g.d && ok; ++s) {
      std::int64_t fs = 0;
      for (int grp = 1; grp <= sch.groups; ++grp) {
        const auto votes = digit_votes(m, r, j, s, grp, fs, tuning);
        std::int64_t pick = -1;
        int passing = 0;
        for (std::size_t digit = 0; digit < votes.size(); ++digit)
          if (votes[digit] >= needed) {
            ++passing;
            pick = static_cast<std::int64_t>(digit);
          }
        if (passing != 1) {
          ok = false;
          break;
        }
        const std::int64_t below = sch.cumulative[static_cast<std::size_t>(grp - 1)] / sch.radix[static_cast<std::size_t>(grp - 1)];
        fs += below * pick;
      }
      f[s] = fs;
    }
    if (!ok) {
      res.failed[j] = 1;
      continue;
    }
    found.insert(g.flat(h.perm.mul_inverse(f)));
  }
  for (std::uint64_t flat : found) res.found.push_back(g.index(flat));
  return res;
}


}  // namespace sfft
