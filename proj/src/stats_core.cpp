#include "kboot/stats_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kboot/error.hpp"

namespace kboot {

Vector normalized_sum(const Matrix& x) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.rows()));
  return x.colwise().sum().transpose() * scale;
}

Vector normalized_sum(const DataMatrix& x) { return normalized_sum(x.values); }

double kth_order_stat(std::span<const double> v, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > v.size())
    fail(ErrorCode::IndexError, "kth_order_stat: k=" + std::to_string(k) + " outside [1, " +
                                    std::to_string(v.size()) + "]");
  if (k == 1) return *std::max_element(v.begin(), v.end());
  std::vector<double> work(v.begin(), v.end());
  auto nth = work.begin() + (k - 1);
  std::nth_element(work.begin(), nth, work.end(), std::greater<>());
  return *nth;
}

int exceedance_count(std::span<const double> v, double t) {
  return static_cast<int>(std::count_if(v.begin(), v.end(), [t](double x) { return x > t; }));
}

double binomial(std::int64_t n, std::int64_t s) {
  if (s < 0 || n < 0 || s > n) return 0.0;
  s = std::min(s, n - s);
  double out = 1.0;
  for (std::int64_t i = 1; i <= s; ++i) out = out * static_cast<double>(n - s + i) / static_cast<double>(i);
  return out < 9.0e15 ? std::round(out) : out;
}

double factorial_moment_estimate(std::span<const int> counts, int s) {
  if (s < 1) fail(ErrorCode::DomainError, "factorial_moment_estimate: s must be at least 1");
  if (counts.empty()) fail(ErrorCode::EmptyInput, "factorial_moment_estimate: no counts");
  double total = 0.0;
  for (int c : counts) total += binomial(c, s);
  return total / static_cast<double>(counts.size());
}

std::size_t ecdf_quantile_index(std::size_t size, double p) {
  if (size == 0) fail(ErrorCode::EmptyInput, "ecdf_quantile: empty input");
  if (!(p > 0.0 && p <= 1.0)) fail(ErrorCode::DomainError, "ecdf_quantile: p must lie in (0, 1]");
  const double scaled = p * static_cast<double>(size);
  // absorb representation error when p * size is an integer in exact arithmetic
  auto index = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  return std::clamp<std::size_t>(index, 1, size);
}

double ecdf_quantile_sorted(std::span<const double> sorted, double p) {
  return sorted[ecdf_quantile_index(sorted.size(), p) - 1];
}

double ecdf_quantile(std::span<const double> values, double p) {
  const std::size_t index = ecdf_quantile_index(values.size(), p);
  std::vector<double> work(values.begin(), values.end());
  auto nth = work.begin() + static_cast<std::ptrdiff_t>(index - 1);
  std::nth_element(work.begin(), nth, work.end());
  return *nth;
}

}  // namespace kboot
