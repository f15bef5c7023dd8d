#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kboot/rng.hpp"

namespace kboot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CorrelationFamily { EquiCorr, AR1, Explicit };

struct CorrelationSpec {
  CorrelationFamily family = CorrelationFamily::EquiCorr;
  double rho = 0.0;
  int d = 1;
  std::optional<Matrix> explicit_matrix;
};

enum class DataCase { Asymmetric, Symmetric };

// Observations are rows: values is n x d.
struct DataMatrix {
  Matrix values;
  DataCase data_case = DataCase::Asymmetric;
  double theta = 1.0;
  std::uint64_t seed = 0;

  int n() const { return static_cast<int>(values.rows()); }
  int d() const { return static_cast<int>(values.cols()); }
};

struct CholeskyFactor {
  Matrix lower;
};

// Equicorrelated: rho * 11^T + (1 - rho) I. AR1: rho^|j-k|.
Matrix build_correlation(const CorrelationSpec& spec);

// Throws NonPositiveDefinite when a squared pivot falls below 1e-12.
CholeskyFactor cholesky(const Matrix& r);

// n x d matrix of N(0, R) rows, R = L L^T. Innovations are consumed row by row.
Matrix sample_latent_gaussian(int n, const CholeskyFactor& factor, RngStream& rng);

struct CopulaOptions {
  double theta = 1.0;
  DataCase data_case = DataCase::Asymmetric;
  // The asymmetric design fixes theta = 1; set this to allow other shapes,
  // in which case rows are centered at theta.
  bool allow_any_theta = false;
};

// Gaussian copula with Gamma(theta, 1) marginals. Asymmetric: X = U - theta.
// Symmetric: X = U - U' from two independent copula draws with the same R.
DataMatrix sample_copula_gamma(int n, const CholeskyFactor& factor, const CopulaOptions& options,
                               RngStream& rng);

DataMatrix sample_copula_gamma(int n, const CorrelationSpec& spec, const CopulaOptions& options,
                               std::uint64_t seed);

// Stationary AR(1): Z_1 ~ N(0, sigma^2), Z_{j+1} = rho Z_j + sigma sqrt(1 - rho^2) e_j.
std::vector<double> sample_ar1_path(int d, double rho, double sigma, RngStream& rng);

}  // namespace kboot
