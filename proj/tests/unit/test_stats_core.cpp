#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "kboot/error.hpp"
#include "kboot/poisson.hpp"
#include "kboot/rng.hpp"
#include "kboot/stats_core.hpp"

using namespace kboot;

namespace {

std::vector<double> random_vector(RngStream& rng, int d, bool with_ties) {
  std::vector<double> v(d);
  for (double& x : v) x = with_ties ? std::floor(rng.uniform() * 6.0) : rng.normal();
  return v;
}

// First sample value whose ECDF reaches p, by scanning every candidate.
double ecdf_scan(const std::vector<double>& values, double p) {
  std::vector<double> cand = values;
  std::sort(cand.begin(), cand.end());
  for (double t : cand) {
    const auto le = std::count_if(values.begin(), values.end(), [t](double v) { return v <= t; });
    if (static_cast<double>(le) / values.size() >= p) return t;
  }
  return cand.back();
}

}  // namespace

TEST(NormalizedSum, SmallCases) {
  Matrix one(1, 2);
  one << 1, 2;
  EXPECT_EQ(normalized_sum(one), Vector((Vector(2) << 1, 2).finished()));
  Matrix two(2, 2);
  two << 1, 0, -1, 0;
  EXPECT_EQ(normalized_sum(two), Vector::Zero(2));
}

TEST(NormalizedSum, MatchesLoopOracle) {
  RngStream rng(3);
  Matrix x(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
  const Vector s = normalized_sum(x);
  for (int j = 0; j < 3; ++j) {
    double total = 0.0;
    for (int i = 0; i < 5; ++i) total += x(i, j);
    EXPECT_NEAR(s(j), total / std::sqrt(5.0), 1e-14);
  }
}

TEST(KthOrderStat, SmallCases) {
  const std::vector<double> a{3, 1, 2};
  EXPECT_EQ(kth_order_stat(a, 2), 2.0);
  const std::vector<double> b{5, 5, 1};
  EXPECT_EQ(kth_order_stat(b, 2), 5.0);
  EXPECT_EQ(kth_order_stat(b, 3), 1.0);
}

TEST(KthOrderStat, MatchesSortOracle) {
  RngStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> v = random_vector(rng, 100, trial % 2 == 1);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (int k = 1; k <= 100; ++k) ASSERT_EQ(kth_order_stat(v, k), sorted[k - 1]);
    EXPECT_EQ(kth_order_stat(v, 1), *std::max_element(v.begin(), v.end()));
    EXPECT_EQ(kth_order_stat(v, 100), *std::min_element(v.begin(), v.end()));
  }
}

TEST(KthOrderStat, RejectsBadIndex) {
  const std::vector<double> v{1, 2, 3};
  try {
    kth_order_stat(v, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexError);
  }
  EXPECT_THROW(kth_order_stat(v, 4), Error);
}

TEST(ExceedanceCount, StrictInequality) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_EQ(exceedance_count(v, 2.0), 1);
  EXPECT_EQ(exceedance_count(v, 0.0), 3);
  EXPECT_EQ(exceedance_count(v, 3.0), 0);
}

TEST(ExceedanceCount, DualityWithOrderStatistics) {
  RngStream rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_index(30));
    const std::vector<double> v = random_vector(rng, d, trial % 3 == 0);
    const double t = trial % 3 == 0 ? std::floor(rng.uniform() * 7.0) - 0.5 * (trial % 2) : rng.normal();
    const int count = exceedance_count(v, t);
    for (int k = 1; k <= d; ++k) ASSERT_EQ(kth_order_stat(v, k) <= t, count <= k - 1);
  }
}

TEST(FactorialMoment, SmallCases) {
  const std::vector<int> a{3};
  EXPECT_EQ(factorial_moment_estimate(a, 2), 3.0);
  const std::vector<int> b{0, 1};
  EXPECT_EQ(factorial_moment_estimate(b, 1), 0.5);
  const std::vector<int> c{1, 1};
  EXPECT_EQ(factorial_moment_estimate(c, 2), 0.0);
}

TEST(FactorialMoment, BinomialCountsMatchClosedForm) {
  RngStream rng(6);
  const int draws = 100000;
  std::vector<int> counts(draws);
  for (int& c : counts) {
    c = 0;
    for (int j = 0; j < 10; ++j) c += rng.uniform() < 0.3;
  }
  // E C(N,2) = C(10,2) p^2; Var C(N,2) from the first four factorial moments
  const double mean = 45 * 0.09;
  double var = 0.0;
  for (int c : counts) var += (binomial(c, 2) - mean) * (binomial(c, 2) - mean);
  var /= draws;
  EXPECT_NEAR(factorial_moment_estimate(counts, 2), 4.05, 4.0 * std::sqrt(var / draws));
}

TEST(FactorialMoment, InclusionExclusionRecoversTailFrequency) {
  RngStream rng(7);
  std::vector<int> counts(500);
  for (int& c : counts) c = static_cast<int>(rng.uniform_index(13));
  const int top = *std::max_element(counts.begin(), counts.end());
  for (int k = 1; k <= 5; ++k) {
    double via_moments = 0.0;
    for (int s = k; s <= top; ++s) via_moments += inclusion_exclusion_weight(s, k) * factorial_moment_estimate(counts, s);
    const double direct =
        static_cast<double>(std::count_if(counts.begin(), counts.end(), [k](int c) { return c >= k; })) / counts.size();
    EXPECT_NEAR(via_moments, direct, 1e-9) << "k " << k;
  }
}

TEST(Binomial, Values) {
  EXPECT_EQ(binomial(5, 2), 10.0);
  EXPECT_EQ(binomial(3, 5), 0.0);
  EXPECT_EQ(binomial(7, 0), 1.0);
  EXPECT_NEAR(binomial(400, 10) / 2.5798075602615554e19, 1.0, 1e-9);
}

TEST(EcdfQuantile, SmallCases) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  EXPECT_EQ(ecdf_quantile(v, 0.5), 3.0);
  const std::vector<double> single{7};
  for (double p : {0.01, 0.5, 0.99}) EXPECT_EQ(ecdf_quantile(single, p), 7.0);
  EXPECT_THROW(ecdf_quantile(std::vector<double>{}, 0.5), Error);
}

TEST(EcdfQuantile, IndexFormulaAtB499) {
  EXPECT_EQ(ecdf_quantile_index(499, 0.9), 450u);
  std::vector<double> v(499);
  for (int i = 0; i < 499; ++i) v[i] = 499 - i;  // descending input
  EXPECT_EQ(ecdf_quantile(v, 0.9), 450.0);
  EXPECT_EQ(ecdf_scan(v, 0.9), 450.0);
}

TEST(EcdfQuantile, MatchesLinearScanAndIsMonotone) {
  RngStream rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int size = 1 + static_cast<int>(rng.uniform_index(60));
    const std::vector<double> v = random_vector(rng, size, trial % 2 == 0);
    double prev = -std::numeric_limits<double>::infinity();
    for (double p = 0.013; p < 1.0; p += 0.0371) {
      const double q = ecdf_quantile(v, p);
      ASSERT_EQ(q, ecdf_scan(v, p));
      ASSERT_NE(std::find(v.begin(), v.end(), q), v.end());
      ASSERT_GE(q, prev);
      prev = q;
      std::vector<double> sorted = v;
      std::sort(sorted.begin(), sorted.end());
      ASSERT_EQ(ecdf_quantile_sorted(sorted, p), q);
    }
  }
}

TEST(EcdfQuantile, ExactFractionsSelectTheirOwnIndex) {
  // p = j / B must select the j-th order statistic despite rounding in p * B
  for (std::size_t B : {10u, 49u, 99u, 299u, 499u})
    for (std::size_t j = 1; j <= B; ++j)
      ASSERT_EQ(ecdf_quantile_index(B, static_cast<double>(j) / static_cast<double>(B)), j);
}
