#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kboot/sampling.hpp"

namespace kboot {

// S_n = n^{-1/2} sum_i X_i.
Vector normalized_sum(const DataMatrix& x);
Vector normalized_sum(const Matrix& x);

// k-th largest element (1-based k) of the multiset `v`, by selection.
double kth_order_stat(std::span<const double> v, int k);

// Number of coordinates strictly above t.
int exceedance_count(std::span<const double> v, double t);

// Binomial coefficient C(n, s) as a double; 0 when s > n.
double binomial(std::int64_t n, std::int64_t s);

// Sample mean of C(N, s) over the given counts.
double factorial_moment_estimate(std::span<const int> counts, int s);

// Index (1-based) of the ascending order statistic that realizes the
// generalized inverse of the ECDF of `size` values at p: ceil(p * size),
// clamped to [1, size].
std::size_t ecdf_quantile_index(std::size_t size, double p);

// inf{t : F_hat(t) >= p}; p in (0, 1].
double ecdf_quantile(std::span<const double> values, double p);
// Same on an ascending-sorted range, without copying.
double ecdf_quantile_sorted(std::span<const double> sorted, double p);

}  // namespace kboot
