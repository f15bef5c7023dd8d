#include "kboot/sampling.hpp"

#include <cmath>
#include <string>

#include "kboot/error.hpp"
#include "kboot/special.hpp"

namespace kboot {

Matrix build_correlation(const CorrelationSpec& spec) {
  if (spec.d < 1) fail(ErrorCode::DomainError, "build_correlation: d must be positive");
  const int d = spec.d;
  switch (spec.family) {
    case CorrelationFamily::EquiCorr: {
      if (!(spec.rho >= 0.0 && spec.rho < 1.0))
        fail(ErrorCode::InvalidRho, "equicorrelated design needs rho in [0, 1)");
      Matrix r = Matrix::Constant(d, d, spec.rho);
      r.diagonal().setOnes();
      return r;
    }
    case CorrelationFamily::AR1: {
      if (!(std::abs(spec.rho) < 1.0))
        fail(ErrorCode::InvalidRho, "AR(1) design needs |rho| < 1");
      Matrix r(d, d);
      std::vector<double> powers(d);
      powers[0] = 1.0;
      for (int h = 1; h < d; ++h) powers[h] = powers[h - 1] * spec.rho;
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) r(j, k) = powers[std::abs(j - k)];
      return r;
    }
    case CorrelationFamily::Explicit: {
      if (!spec.explicit_matrix) fail(ErrorCode::DomainError, "explicit design without a matrix");
      const Matrix& m = *spec.explicit_matrix;
      if (m.rows() != d || m.cols() != d)
        fail(ErrorCode::DomainError, "explicit correlation matrix must be d x d");
      for (int j = 0; j < d; ++j) {
        if (m(j, j) != 1.0) fail(ErrorCode::DomainError, "explicit correlation matrix needs a unit diagonal");
        for (int k = 0; k < j; ++k)
          if (m(j, k) != m(k, j)) fail(ErrorCode::DomainError, "explicit correlation matrix must be symmetric");
      }
      return m;
    }
  }
  fail(ErrorCode::DomainError, "unknown correlation family");
}

CholeskyFactor cholesky(const Matrix& r) {
  if (r.rows() != r.cols()) fail(ErrorCode::DomainError, "cholesky: matrix must be square");
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NonPositiveDefinite, "cholesky: matrix is not positive definite");
  CholeskyFactor out{llt.matrixL()};
  for (Eigen::Index j = 0; j < out.lower.rows(); ++j) {
    const double pivot = out.lower(j, j);
    if (!(pivot * pivot > 1e-12))
      fail(ErrorCode::NonPositiveDefinite,
           "cholesky: pivot " + std::to_string(j) + " below tolerance");
  }
  return out;
}

Matrix sample_latent_gaussian(int n, const CholeskyFactor& factor, RngStream& rng) {
  const auto d = factor.lower.rows();
  Matrix eps(n, d);
  for (int i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) eps(i, j) = rng.normal();
  return eps * factor.lower.transpose();
}

namespace {

Matrix copula_draw(int n, const CholeskyFactor& factor, double theta, RngStream& rng) {
  Matrix u = sample_latent_gaussian(n, factor, rng);
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) = gamma_quantile_of_normal(u(i, j), theta);
  return u;
}

}  // namespace

DataMatrix sample_copula_gamma(int n, const CholeskyFactor& factor, const CopulaOptions& options,
                               RngStream& rng) {
  if (n < 1) fail(ErrorCode::DomainError, "sample_copula_gamma: n must be positive");
  if (!(options.theta > 0.0)) fail(ErrorCode::DomainError, "sample_copula_gamma: theta must be positive");
  if (options.data_case == DataCase::Asymmetric && options.theta != 1.0 && !options.allow_any_theta)
    fail(ErrorCode::DomainError, "asymmetric case uses theta = 1 unless explicitly overridden");

  DataMatrix out;
  out.data_case = options.data_case;
  out.theta = options.theta;
  out.seed = rng.key();
  out.values = copula_draw(n, factor, options.theta, rng);
  if (options.data_case == DataCase::Asymmetric) {
    out.values.array() -= options.theta;
  } else {
    out.values -= copula_draw(n, factor, options.theta, rng);
  }
  return out;
}

DataMatrix sample_copula_gamma(int n, const CorrelationSpec& spec, const CopulaOptions& options,
                               std::uint64_t seed) {
  const CholeskyFactor factor = cholesky(build_correlation(spec));
  RngStream rng(seed);
  DataMatrix out = sample_copula_gamma(n, factor, options, rng);
  out.seed = seed;
  return out;
}

std::vector<double> sample_ar1_path(int d, double rho, double sigma, RngStream& rng) {
  if (d < 1) fail(ErrorCode::DomainError, "sample_ar1_path: d must be positive");
  if (!(std::abs(rho) < 1.0)) fail(ErrorCode::DomainError, "sample_ar1_path: need |rho| < 1");
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "sample_ar1_path: sigma must be positive");
  std::vector<double> path(d);
  const double innovation = sigma * std::sqrt(1.0 - rho * rho);
  path[0] = sigma * rng.normal();
  for (int j = 1; j < d; ++j) path[j] = rho * path[j - 1] + innovation * rng.normal();
  return path;
}

}  // namespace kboot
