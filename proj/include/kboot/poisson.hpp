#pragma once

namespace kboot {

// h_k(lambda) = e^{-lambda} sum_{m<k} lambda^m / m!, the Poisson(lambda) cdf at k - 1.
double hk(int k, double lambda);

// The unique Lambda with h_k(Lambda) = eps / 8, by bisection.
double solve_lambda_eps(int k, double eps);

struct InclusionExclusion {
  double truncated = 0.0;  // sum_{s=k}^{min(m,N)} (-1)^{s-k} C(s-1,k-1) C(N,s)
  double bound = 0.0;      // C(m, k-1) C(N, m+1)
};

InclusionExclusion inclusion_exclusion_indicator(int N, int k, int m);

// Inclusion-exclusion weight (-1)^{s-k} C(s-1, k-1).
double inclusion_exclusion_weight(int s, int k);

// P(Binomial(d, p) <= k - 1).
double binomial_cdf_below(int d, double p, int k);

// |P(Binomial(d, p) <= k - 1) - h_k(d p)|.
double binomial_poisson_gap(int d, double p, int k);

}  // namespace kboot
