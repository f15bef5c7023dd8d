#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <gtest/gtest.h>

#include "kboot/error.hpp"
#include "kboot/poisson.hpp"
#include "kboot/stats_core.hpp"

using namespace kboot;

TEST(Hk, ClosedForms) {
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(hk(k, 0.0), 1.0);
  EXPECT_NEAR(hk(1, 1.3), std::exp(-1.3), 1e-15);
  EXPECT_NEAR(hk(1, std::log(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(hk(3, 2.0), 5.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(hk(3, 2.0), 0.676676, 1e-6);
}

TEST(Hk, MatchesPoissonCdfAndIsMonotone) {
  for (int k = 1; k <= 8; ++k) {
    double prev = 1.0;
    for (double lambda = 0.05; lambda < 25.0; lambda += 0.37) {
      const boost::math::poisson_distribution<double> pois(lambda);
      const double h = hk(k, lambda);
      EXPECT_NEAR(h, boost::math::cdf(pois, k - 1), 1e-13);
      EXPECT_LT(h, prev);
      EXPECT_LT(h, hk(k + 1, lambda));
      prev = h;
    }
  }
  EXPECT_THROW(hk(0, 1.0), Error);
  EXPECT_THROW(hk(1, -1.0), Error);
}

TEST(SolveLambdaEps, ClosedFormAndReference) {
  EXPECT_NEAR(solve_lambda_eps(1, 0.1), std::log(80.0), 1e-10);
  EXPECT_NEAR(solve_lambda_eps(1, 0.1), 4.382027, 1e-6);
  EXPECT_NEAR(solve_lambda_eps(2, 0.1), 6.381, 0.01);
  for (int k = 1; k <= 6; ++k)
    for (double eps : {0.01, 0.1, 0.3}) {
      const double lam = solve_lambda_eps(k, eps);
      EXPECT_NEAR(hk(k, lam), eps / 8.0, 1e-12);
    }
  EXPECT_GT(solve_lambda_eps(3, 0.1), solve_lambda_eps(2, 0.1));
  EXPECT_GT(solve_lambda_eps(2, 0.1), solve_lambda_eps(1, 0.1));
  EXPECT_THROW(solve_lambda_eps(2, 0.5), Error);
}

TEST(InclusionExclusion, SmallCases) {
  const InclusionExclusion full = inclusion_exclusion_indicator(3, 2, 3);
  EXPECT_EQ(full.truncated, 1.0);
  EXPECT_EQ(full.bound, 0.0);
  for (int m = 2; m <= 6; ++m) EXPECT_EQ(inclusion_exclusion_indicator(1, 2, m).truncated, 0.0);
  EXPECT_EQ(inclusion_exclusion_weight(4, 2), 3.0);
  EXPECT_EQ(inclusion_exclusion_weight(5, 2), -4.0);
}

TEST(InclusionExclusion, ExhaustiveIdentityAndBonferroniBound) {
  for (int N = 0; N <= 12; ++N)
    for (int k = 1; k <= 5; ++k)
      for (int m = k; m <= 12; ++m) {
        const InclusionExclusion ie = inclusion_exclusion_indicator(N, k, m);
        const double indicator = N >= k ? 1.0 : 0.0;
        if (m >= N) {
          ASSERT_EQ(ie.truncated, indicator) << N << " " << k << " " << m;
        }
        ASSERT_LE(std::abs(indicator - ie.truncated), ie.bound) << N << " " << k << " " << m;
      }
}

TEST(InclusionExclusion, PoissonSeriesAgreesWithHkWithinRemainder) {
  for (int k = 1; k <= 5; ++k)
    for (int k0 = k; k0 <= 30; ++k0)
      for (double lambda = 0.25; lambda <= 10.0; lambda += 0.25) {
        // P(N >= k) for N ~ Poisson(lambda) from factorial moments lambda^s / s!
        double series = 0.0, magnitude = 0.0, term = 1.0;
        for (int s = 1; s <= k0; ++s) {
          term *= lambda / s;
          if (s < k) continue;
          series += inclusion_exclusion_weight(s, k) * term;
          magnitude += std::abs(inclusion_exclusion_weight(s, k)) * term;
        }
        const double remainder = binomial(k0, k - 1) * std::exp((k0 + 1) * std::log(lambda) - std::lgamma(k0 + 2.0));
        // rounding: relative to the alternating sum magnitude, plus 1 - h_k near 1
        ASSERT_LE(std::abs(1.0 - hk(k, lambda) - series), remainder + 1e-13 * magnitude + 1e-15)
            << "k " << k << " k0 " << k0 << " lambda " << lambda;
      }
}

TEST(BinomialCdf, AgreesWithBoost) {
  for (int d : {1, 5, 100, 400, 5000})
    for (double p : {1e-4, 0.005, 0.1, 0.5, 0.93})
      for (int k = 1; k <= std::min(d, 6); ++k) {
        const boost::math::binomial_distribution<double> bin(d, p);
        EXPECT_NEAR(binomial_cdf_below(d, p, k), boost::math::cdf(bin, k - 1), 1e-12) << d << " " << p << " " << k;
      }
  EXPECT_EQ(binomial_cdf_below(3, 0.5, 5), 1.0);
}

TEST(BinomialPoissonGap, SmallAtDesignScale) {
  const double gap = binomial_poisson_gap(400, 2.0 / 400, 2);
  EXPECT_LT(gap, 0.01);
  const boost::math::binomial_distribution<double> bin(400, 2.0 / 400);
  EXPECT_NEAR(gap, std::abs(boost::math::cdf(bin, 1) - 3.0 * std::exp(-2.0)), 1e-12);
  // the gap shrinks as d grows at fixed lambda
  EXPECT_LT(binomial_poisson_gap(4000, 2.0 / 4000, 2), gap);
}
