#pragma once

// Brute-force reference computations. Everything here is evaluated straight from
// the defining sums and shares no code paths with the library beyond plain types.

#include <vector>

#include "core.hpp"
#include "permutation.hpp"

namespace sfft::oracle {

// e^{2 pi i e / n}, computed directly.
cplx unit_root(std::int64_t n, std::int64_t e);

// O(N^2) orthonormal transform; sign -1 is the forward direction.
std::vector<cplx> direct_dft(const std::vector<cplx>& x, std::int64_t n, int d, int sign);

// One coordinate of the bucket filter: (box Dirichlet kernel of half width M)^F.
double filter_time_1d(std::int64_t n, std::int64_t M, int F, std::int64_t j);
double filter_time(std::int64_t n, int d, std::int64_t M, int F, const GridIndex& j);

// Sigma (i - q) mod n, computed from the matrix entries.
GridIndex permute(const Grid& g, const Matrix& sigma, const GridIndex& q, const GridIndex& i);

// u_s = sum_j G_{(n/b) s - pi(j)} (x - chi)_j omega^{a^T Sigma j} for every bucket s (row-major).
std::vector<cplx> bucket_values(const Grid& g, const std::vector<cplx>& x_minus_chi, const Matrix& sigma, const GridIndex& q, std::int64_t b, std::int64_t M,
                                int F, const GridIndex& a);

}  // namespace sfft::oracle
