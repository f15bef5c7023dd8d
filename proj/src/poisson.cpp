#include "kboot/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "kboot/error.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

double hk(int k, double lambda) {
  if (k < 1) fail(ErrorCode::DomainError, "hk: k must be at least 1");
  if (!(lambda >= 0.0)) fail(ErrorCode::DomainError, "hk: lambda must be nonnegative");
  double term = std::exp(-lambda);
  double sum = term;
  for (int m = 1; m < k; ++m) {
    term *= lambda / m;
    sum += term;
  }
  return std::min(sum, 1.0);
}

double solve_lambda_eps(int k, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorCode::DomainError, "solve_lambda_eps: eps must lie in (0, 1/2)");
  const double target = eps / 8.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hk(k, hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (hk(k, mid) > target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double inclusion_exclusion_weight(int s, int k) {
  const double w = binomial(s - 1, k - 1);
  return (s - k) % 2 == 0 ? w : -w;
}

InclusionExclusion inclusion_exclusion_indicator(int N, int k, int m) {
  if (N < 0 || k < 1 || m < k) fail(ErrorCode::DomainError, "inclusion_exclusion_indicator: need N >= 0, m >= k >= 1");
  InclusionExclusion out;
  for (int s = k; s <= std::min(m, N); ++s) out.truncated += inclusion_exclusion_weight(s, k) * binomial(N, s);
  out.bound = binomial(m, k - 1) * binomial(N, m + 1);
  return out;
}

double binomial_cdf_below(int d, double p, int k) {
  if (d < 1 || k < 1) fail(ErrorCode::DomainError, "binomial_cdf_below: need d >= 1 and k >= 1");
  if (k > d) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  double sum = 0.0;
  for (int m = 0; m < k; ++m) {
    const double log_term = std::lgamma(d + 1.0) - std::lgamma(m + 1.0) - std::lgamma(d - m + 1.0) +
                            m * log_p + (d - m) * log_q;
    sum += std::exp(log_term);
  }
  return std::min(sum, 1.0);
}

double binomial_poisson_gap(int d, double p, int k) {
  return std::abs(binomial_cdf_below(d, p, k) - hk(k, d * p));
}

}  // namespace kboot
