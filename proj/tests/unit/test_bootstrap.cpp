#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "kboot/bootstrap.hpp"
#include "kboot/error.hpp"
#include "kboot/special.hpp"
#include "kboot/stats_core.hpp"

using namespace kboot;

namespace {

std::vector<MultiplierLaw> all_laws() {
  return {MultiplierLaw::gaussian(), MultiplierLaw::mammen(), MultiplierLaw::rademacher(), MultiplierLaw::beta(0.1)};
}

Matrix column(std::initializer_list<double> values) {
  Matrix x(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) x(i++, 0) = v;
  return x;
}

std::map<long, double> frequencies(const std::vector<double>& stats, double unit) {
  std::map<long, double> out;
  for (double s : stats) out[std::lround(s / unit)] += 1.0 / stats.size();
  return out;
}

double ks_normal(std::vector<double> xs, double sd) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i] / sd);
    dmax = std::max({dmax, (i + 1) / n - f, f - i / n});
  }
  return dmax;
}

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) dmax = std::max({dmax, (i + 1) / n - xs[i], xs[i] - i / n});
  return dmax;
}

}  // namespace

TEST(MultiplierLaw, AnalyticMoments) {
  for (const auto& law : all_laws()) {
    EXPECT_NEAR(law.raw_moment(1), 0.0, 1e-12) << law.name();
    EXPECT_NEAR(law.raw_moment(2), 1.0, 1e-12) << law.name();
  }
  EXPECT_NEAR(MultiplierLaw::mammen().gamma(), 1.0, 1e-12);
  EXPECT_NEAR(MultiplierLaw::beta(0.1).gamma(), 1.0, 1e-12);
  EXPECT_NEAR(MultiplierLaw::beta(2.0).gamma(), 1.0, 1e-12);
  EXPECT_EQ(MultiplierLaw::gaussian().gamma(), 0.0);
  EXPECT_EQ(MultiplierLaw::rademacher().gamma(), 0.0);
  EXPECT_TRUE(MultiplierLaw::mammen().matches_third_moment());
  EXPECT_TRUE(MultiplierLaw::beta(0.1).matches_third_moment());
  EXPECT_FALSE(MultiplierLaw::gaussian().matches_third_moment());
  EXPECT_FALSE(MultiplierLaw::rademacher().matches_third_moment());
}

TEST(MultiplierLaw, MammenTwoPointSupport) {
  EXPECT_NEAR(kMammenHigh, (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(kMammenLow, -(std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(kMammenHighProb, (std::sqrt(5.0) - 1.0) / (2.0 * std::sqrt(5.0)), 1e-15);
  EXPECT_NEAR(kMammenHighProb, 0.276393, 1e-6);
  RngStream rng(1);
  const auto law = MultiplierLaw::mammen();
  for (int i = 0; i < 1000; ++i) {
    const double w = law.sample(rng);
    ASSERT_TRUE(w == kMammenHigh || w == kMammenLow);
  }
}

TEST(MultiplierLaw, BetaShapeArithmetic) {
  const BetaShape s = beta_shape(0.1);
  EXPECT_NEAR(s.c, 22.01, 1e-12);
  EXPECT_NEAR(s.alpha, 0.0276190, 1e-7);
  EXPECT_NEAR(s.beta, 0.0723810, 1e-7);
  EXPECT_NEAR(s.alpha + s.beta, 0.1, 1e-12);
  EXPECT_THROW(beta_shape(0.0), Error);
}

TEST(MultiplierLaw, SampleMomentsWithinBands) {
  const int n = 1000000;
  for (const auto& law : all_laws()) {
    RngStream rng(derive_key({21, static_cast<std::uint64_t>(law.kind())}));
    double m[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
      const double w = law.sample(rng);
      m[1] += w;
      m[2] += w * w;
      m[3] += w * w * w;
    }
    for (int r = 1; r <= 3; ++r) {
      const double exact = law.raw_moment(r);
      const double se = std::sqrt((law.raw_moment(2 * r) - exact * exact) / n);
      EXPECT_NEAR(m[r] / n, exact, 4.0 * se) << law.name() << " moment " << r;
    }
  }
}

TEST(MultiplierLaw, RademacherHasUnitModulus) {
  RngStream rng(2);
  const auto law = MultiplierLaw::rademacher();
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(std::abs(law.sample(rng)), 1.0);
}

TEST(WildBootstrap, IdenticalRowsGiveZeroReplicates) {
  Matrix x = Matrix::Constant(6, 4, 2.5);
  for (const auto& law : all_laws()) {
    const BootstrapDraws draws = wild_bootstrap_draws(x, law, 50, 2, RngStream(3));
    for (double s : draws.stats) ASSERT_EQ(s, 0.0);
  }
  const BootstrapDraws eb = empirical_bootstrap_draws(x, 50, 2, RngStream(3));
  for (double s : eb.stats) ASSERT_EQ(s, 0.0);
  const DoubleBootOutcome db =
      double_bootstrap(x, MultiplierLaw::gaussian(), MultiplierLaw::beta(0.1), 20, 10, 0.1, 2, RngStream(3));
  for (double u : db.u_values) ASSERT_EQ(u, 1.0);
  EXPECT_EQ(db.beta_hat, 1.0);
  EXPECT_EQ(db.critical, 0.0);
}

TEST(WildBootstrap, RademacherTwoPointEnumeration) {
  const BootstrapDraws draws = wild_bootstrap_draws(column({1.0, -1.0}), MultiplierLaw::rademacher(), 10000, 1, RngStream(4));
  EXPECT_TRUE(std::is_sorted(draws.stats.begin(), draws.stats.end()));
  const auto freq = frequencies(draws.stats, std::sqrt(2.0));
  ASSERT_EQ(freq.size(), 3u);
  const double se = std::sqrt(0.25 * 0.75 / 10000);
  EXPECT_NEAR(freq.at(-1), 0.25, 4 * se);
  EXPECT_NEAR(freq.at(0), 0.5, 4 * std::sqrt(0.25 / 10000));
  EXPECT_NEAR(freq.at(1), 0.25, 4 * se);
  for (double s : draws.stats) ASSERT_TRUE(s == 0.0 || std::abs(std::abs(s) - std::sqrt(2.0)) < 1e-12);
}

TEST(WildBootstrap, GaussianLawIsConditionallyNormal) {
  RngStream data_rng(5);
  Matrix x(40, 1);
  for (int i = 0; i < 40; ++i) x(i, 0) = data_rng.gamma(1.0);
  const Matrix centered = center_rows(x);
  const double sd = std::sqrt(centered.squaredNorm() / 40.0);
  const BootstrapDraws draws = wild_bootstrap_draws(x, MultiplierLaw::gaussian(), 5000, 1, RngStream(6));
  EXPECT_LT(ks_normal(draws.stats, sd), 1.628 / std::sqrt(5000.0));
}

TEST(EmpiricalBootstrap, TwoPointEnumeration) {
  const BootstrapDraws draws = empirical_bootstrap_draws(column({0.0, 2.0}), 10000, 1, RngStream(7));
  const auto freq = frequencies(draws.stats, std::sqrt(2.0));
  ASSERT_EQ(freq.size(), 3u);
  const double se = std::sqrt(0.25 * 0.75 / 10000);
  EXPECT_NEAR(freq.at(-1), 0.25, 4 * se);
  EXPECT_NEAR(freq.at(0), 0.5, 4 * std::sqrt(0.25 / 10000));
  EXPECT_NEAR(freq.at(1), 0.25, 4 * se);
  EXPECT_FALSE(draws.law.has_value());
}

TEST(EmpiricalBootstrap, CenteredForSymmetricData) {
  RngStream data_rng(8);
  Matrix x(100, 1);
  for (int i = 0; i < 100; ++i) x(i, 0) = data_rng.normal();
  const BootstrapDraws draws = empirical_bootstrap_draws(x, 20000, 1, RngStream(9));
  double mean = 0.0, sq = 0.0;
  for (double s : draws.stats) mean += s;
  mean /= draws.B();
  for (double s : draws.stats) sq += (s - mean) * (s - mean);
  EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(sq / draws.B() / draws.B()));
}

TEST(WildBootstrap, ReplicatesDependOnlyOnStream) {
  RngStream data_rng(10);
  Matrix x(30, 12);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 12; ++j) x(i, j) = data_rng.normal();
  const BootstrapDraws a = wild_bootstrap_draws(x, MultiplierLaw::mammen(), 200, 3, RngStream(11));
  const BootstrapDraws b = wild_bootstrap_draws(x, MultiplierLaw::mammen(), 200, 3, RngStream(11));
  EXPECT_EQ(a.stats, b.stats);
  // a prefix of replicates is unchanged when B grows
  const BootstrapDraws small = wild_bootstrap_draws(x, MultiplierLaw::gaussian(), 1, 3, RngStream(12));
  const Matrix w = multiplier_weights(MultiplierLaw::gaussian(), 30, 5, RngStream(12));
  EXPECT_NEAR(small.stats[0], weighted_order_stats(center_rows(x), w.leftCols(1), 3)[0], 1e-14);
}

TEST(WildBootstrap, ColumnPermutationLeavesReplicatesUnchanged) {
  RngStream data_rng(13);
  Matrix x(25, 9);
  for (int i = 0; i < 25; ++i)
    for (int j = 0; j < 9; ++j) x(i, j) = data_rng.normal();
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(9);
  perm.indices() << 4, 0, 8, 2, 7, 1, 6, 3, 5;
  const Matrix permuted = x * perm;
  for (const auto& law : all_laws()) {
    const BootstrapDraws a = wild_bootstrap_draws(x, law, 300, 2, RngStream(14));
    const BootstrapDraws b = wild_bootstrap_draws(permuted, law, 300, 2, RngStream(14));
    for (int i = 0; i < 300; ++i) ASSERT_NEAR(a.stats[i], b.stats[i], 1e-12) << law.name();
  }
}

TEST(CriticalValue, QuantileConventions) {
  BootstrapDraws draws;
  draws.stats = {1, 2, 3, 4, 5};
  EXPECT_EQ(critical_value(draws, 0.5), 3.0);
  BootstrapDraws big;
  for (int i = 1; i <= 499; ++i) big.stats.push_back(i * 0.01);
  EXPECT_DOUBLE_EQ(critical_value(big, 0.9), 450 * 0.01);
  RngStream rng(15);
  Matrix x(20, 5);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 5; ++j) x(i, j) = rng.normal();
  const BootstrapDraws d = wild_bootstrap_draws(x, MultiplierLaw::gaussian(), 99, 2, RngStream(16));
  EXPECT_GE(critical_value(d, 0.95), critical_value(d, 0.90));
  EXPECT_THROW(critical_value(BootstrapDraws{}, 0.5), Error);
}

TEST(DoubleBootstrap, RejectsSecondLevelLawWithoutUnitSkew) {
  const Matrix x = column({1.0, -0.5, 0.3});
  try {
    double_bootstrap(x, MultiplierLaw::gaussian(), MultiplierLaw::rademacher(), 5, 5, 0.1, 1, RngStream(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSecondLevelLaw);
  }
}

TEST(DoubleBootstrap, MatchesNestedLoopOracle) {
  const Matrix x = column({0.7, -1.9});
  const auto outer_law = MultiplierLaw::rademacher();
  const auto inner_law = MultiplierLaw::beta(0.1);
  const RngStream rng(2024);
  const int B1 = 2, B2 = 2, n = 2;
  const double alpha = 0.1;

  // hand-rolled: same stream contract, scalar loops only
  const double xbar = (x(0, 0) + x(1, 0)) / n;
  std::vector<double> t_star(B1), u(B1);
  const RngStream inner_root(derive_key({rng.key(), kInnerStreamTag}));
  for (int b = 0; b < B1; ++b) {
    RngStream ws = rng.substream(b);
    double xs[2];
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = outer_law.sample(ws);
      xs[i] = w * (x(i, 0) - xbar);
      s += xs[i];
    }
    t_star[b] = s * (1.0 / std::sqrt(2.0));
    const double xs_bar = (xs[0] + xs[1]) / n;
    int below = 0;
    for (int c = 0; c < B2; ++c) {
      RngStream vs = inner_root.substream(b).substream(c);
      double inner = 0.0;
      for (int i = 0; i < n; ++i) inner += inner_law.sample(vs) * (xs[i] - xs_bar);
      below += inner * (1.0 / std::sqrt(2.0)) <= t_star[b];
    }
    u[b] = static_cast<double>(below) / B2;
  }
  std::vector<double> u_sorted = u;
  std::sort(u_sorted.begin(), u_sorted.end());
  const double beta_hat = std::max(u_sorted[static_cast<int>(std::ceil((1 - alpha) * B1)) - 1], 1.0 / B1);
  std::vector<double> t_sorted = t_star;
  std::sort(t_sorted.begin(), t_sorted.end());
  const double critical = t_sorted[std::max(1, static_cast<int>(std::ceil(beta_hat * B1 - 1e-9))) - 1];

  const DoubleBootOutcome out = double_bootstrap(x, outer_law, inner_law, B1, B2, alpha, 1, rng);
  ASSERT_EQ(out.u_values.size(), 2u);
  for (int b = 0; b < B1; ++b) EXPECT_DOUBLE_EQ(out.u_values[b], u[b]);
  EXPECT_DOUBLE_EQ(out.beta_hat, beta_hat);
  EXPECT_DOUBLE_EQ(out.critical, critical);
  EXPECT_NE(std::find(out.outer.stats.begin(), out.outer.stats.end(), out.critical), out.outer.stats.end());
}

TEST(DoubleBootstrap, PrepivotedValuesAreNearlyUniformForGaussianData) {
  RngStream data_rng(31);
  Matrix x(200, 1);
  for (int i = 0; i < 200; ++i) x(i, 0) = data_rng.normal();
  const auto law = MultiplierLaw::beta(0.1);
  const DoubleBootOutcome out = double_bootstrap(x, law, law, 300, 1000, 0.1, 1, RngStream(32));
  EXPECT_LT(ks_uniform(out.u_values), 1.628 / std::sqrt(300.0));
  EXPECT_GT(out.beta_hat, 0.0);
  EXPECT_LE(out.beta_hat, 1.0);
}
