#include <cmath>

#include <gtest/gtest.h>

#include "kboot/array_conditions.hpp"
#include "kboot/error.hpp"

using namespace kboot;

TEST(Gershgorin, TwoByTwoEquicorrelated) {
  Matrix a(2, 2);
  a << 1, 0.8, 0.8, 1;
  const GershgorinInterval g = gershgorin_interval(a);
  EXPECT_NEAR(g.lower, 0.2, 1e-15);
  EXPECT_NEAR(g.upper, 1.8, 1e-15);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  EXPECT_NEAR(solver.eigenvalues()(0), 0.2, 1e-12);
  EXPECT_NEAR(solver.eigenvalues()(1), 1.8, 1e-12);
}

TEST(Gershgorin, ContainsSpectrumOfRandomSymmetricMatrices) {
  RngStream rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_index(6));
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
    const GershgorinInterval g = gershgorin_interval(a);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    EXPECT_GE(solver.eigenvalues().minCoeff(), g.lower - 1e-12);
    EXPECT_LE(solver.eigenvalues().maxCoeff(), g.upper + 1e-12);
  }
}

TEST(ArrayConditions, IdentityCovarianceGaussians) {
  const int n = 100000, d = 6;
  RngStream rng(2);
  Matrix a(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  ArrayConditionOptions opts;
  opts.k0 = 4;
  opts.cov_dev_bound = 0.05;
  const ArrayConditionReport r = validate_array_conditions(a, Matrix::Identity(d, d), opts, RngStream(3));
  EXPECT_NEAR(r.min_eigenvalue(), 1.0, 0.03);
  // largest of 21 entrywise deviations, each with sd about n^{-1/2}
  EXPECT_LT(r.max_cov_dev, 5.0 * std::sqrt(2.0 / n));
  EXPECT_TRUE(r.eigen_pass);
  EXPECT_TRUE(r.cov_dev_pass);
  EXPECT_EQ(r.min_eig_by_size.size(), 4u);
  EXPECT_GT(r.subsets_checked, 0);
  for (const auto& [size, value] : r.min_eig_by_size) EXPECT_GE(value, r.gershgorin_by_size.at(size) - 1e-12);
}

TEST(ArrayConditions, ZeroArrayFailsEigenCondition) {
  const ArrayConditionReport r =
      validate_array_conditions(Matrix::Zero(10, 3), Matrix::Identity(3, 3), ArrayConditionOptions{}, RngStream(4));
  EXPECT_EQ(r.min_eigenvalue(), 0.0);
  EXPECT_FALSE(r.eigen_pass);
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.max_sup_norm, 0.0);
  EXPECT_DOUBLE_EQ(r.max_cov_dev, 1.0);
}

TEST(ArrayConditions, ReportedValuesAreExactFunctionsOfInput) {
  Matrix a(2, 2);
  a << 1, 3, -2, 1;
  ArrayConditionOptions opts;
  opts.k0 = 2;
  opts.sup_norm_bound = 2.5;
  const ArrayConditionReport r = validate_array_conditions(a, Matrix::Identity(2, 2), opts, RngStream(5));
  EXPECT_EQ(r.max_sup_norm, 3.0);
  EXPECT_FALSE(r.sup_norm_pass);
  // Gram = [[2.5, 0.5], [0.5, 5]]
  EXPECT_DOUBLE_EQ(r.max_cov_dev, 4.0);
  const double lmin = 3.75 - std::sqrt(1.25 * 1.25 + 0.25);
  EXPECT_NEAR(r.min_eig_by_size.at(2), lmin, 1e-12);
  EXPECT_NEAR(r.min_eig_by_size.at(1), 2.5, 1e-12);
}

TEST(ArrayConditions, RejectsMismatchedSigma) {
  EXPECT_THROW(validate_array_conditions(Matrix::Ones(4, 3), Matrix::Identity(2, 2), {}, RngStream(1)), Error);
}
