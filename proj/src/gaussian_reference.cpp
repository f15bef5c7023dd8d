#include "kboot/gaussian_reference.hpp"

#include <algorithm>
#include <cmath>

#include "kboot/error.hpp"
#include "kboot/poisson.hpp"
#include "kboot/special.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

GaussianMarginals GaussianMarginals::equal(int d, double sigma) {
  return from_sigmas(std::vector<double>(static_cast<std::size_t>(d), sigma));
}

GaussianMarginals GaussianMarginals::from_sigmas(std::vector<double> sigmas) {
  if (sigmas.empty()) fail(ErrorCode::EmptyInput, "GaussianMarginals: no coordinates");
  GaussianMarginals m;
  m.sigma_lower = *std::min_element(sigmas.begin(), sigmas.end());
  m.sigma_upper = *std::max_element(sigmas.begin(), sigmas.end());
  m.sigmas = std::move(sigmas);
  m.validate();
  return m;
}

GaussianMarginals GaussianMarginals::from_covariance(const Matrix& sigma) {
  std::vector<double> sd(static_cast<std::size_t>(sigma.rows()));
  for (Eigen::Index j = 0; j < sigma.rows(); ++j) sd[j] = std::sqrt(sigma(j, j));
  return from_sigmas(std::move(sd));
}

void GaussianMarginals::validate() const {
  if (!(sigma_lower > 0.0 && sigma_lower <= sigma_upper))
    fail(ErrorCode::DomainError, "GaussianMarginals: need 0 < sigma_lower <= sigma_upper");
  for (double s : sigmas)
    if (!(s >= sigma_lower && s <= sigma_upper))
      fail(ErrorCode::DomainError, "GaussianMarginals: sigma outside configured bounds");
}

double phi_sigma(double t, double sigma) { return normal_pdf(t / sigma) / sigma; }

double phi_sigma_d1(double t, double sigma) { return -t / (sigma * sigma) * phi_sigma(t, sigma); }

double phi_sigma_d2(double t, double sigma) {
  const double s2 = sigma * sigma;
  return (t * t / (s2 * s2) - 1.0 / s2) * phi_sigma(t, sigma);
}

double phi_sigma_d3(double t, double sigma) {
  const double s2 = sigma * sigma;
  return -(t * t * t / (s2 * s2 * s2) - 3.0 * t / (s2 * s2)) * phi_sigma(t, sigma);
}

double lambda_t(double t, const GaussianMarginals& marg) {
  double out = 0.0;
  for (double s : marg.sigmas) out += normal_sf(t / s);
  return out;
}

namespace {

void check_dk(int d, int k, double sigma) {
  if (d < 1 || k < 1 || k > d) fail(ErrorCode::DomainError, "need 1 <= k <= d");
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "sigma must be positive");
}

// log of d C(d-1, k-1) p^{k-1} (1-p)^{d-k}, the density of N(t) crossing k-1 w.r.t. p.
double log_crossing_weight(int d, int k, double p) {
  return std::log(static_cast<double>(d)) + std::lgamma(static_cast<double>(d)) - std::lgamma(static_cast<double>(k)) -
         std::lgamma(static_cast<double>(d - k + 1)) + (k - 1) * std::log(p) + (d - k) * std::log1p(-p);
}

}  // namespace

double gk_independent(double t, int d, int k, double sigma) {
  check_dk(d, k, sigma);
  return binomial_cdf_below(d, normal_sf(t / sigma), k);
}

double fk_independent(double t, int d, int k, double sigma) {
  check_dk(d, k, sigma);
  const double p = normal_sf(t / sigma);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return std::exp(log_crossing_weight(d, k, p)) * phi_sigma(t, sigma);
}

double fk_prime_independent(double t, int d, int k, double sigma) {
  check_dk(d, k, sigma);
  const double p = normal_sf(t / sigma);
  if (p <= 0.0 || p >= 1.0) return 0.0;
  const double g = std::exp(log_crossing_weight(d, k, p));
  const double dlog_g_dp = (k - 1) / p - (d - k) / (1.0 - p);
  const double density = phi_sigma(t, sigma);
  // f = g(p(t)) phi_sigma(t), p'(t) = -phi_sigma(t)
  return -g * dlog_g_dp * density * density + g * phi_sigma_d1(t, sigma);
}

double gk_inverse_independent(double p, int d, int k, double sigma) {
  check_dk(d, k, sigma);
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "gk_inverse: p must lie in (0, 1)");
  double lo = -sigma;
  double hi = sigma;
  while (gk_independent(lo, d, k, sigma) >= p) lo *= 2.0;
  while (gk_independent(hi, d, k, sigma) < p) hi *= 2.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gk_independent(mid, d, k, sigma) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

QuantileWindow quantile_window(int k, double eps, int d, double sigma) {
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorCode::DomainError, "quantile_window: eps must lie in (0, 1/2)");
  QuantileWindow w;
  w.t_lo = gk_inverse_independent(0.5 * eps, d, k, sigma);
  w.t_hi = gk_inverse_independent(1.0 - 0.5 * eps, d, k, sigma);
  const double log_d = std::log(static_cast<double>(std::max(d, 3)));
  w.scale_lo = w.t_lo * w.t_lo / log_d;
  w.scale_hi = w.t_hi * w.t_hi / log_d;
  return w;
}

std::vector<MonteCarloEstimate> gk_montecarlo_grid(const std::vector<double>& ts, const Matrix& r,
                                                   const std::vector<double>& sigmas, int k, int reps,
                                                   const RngStream& rng) {
  const auto d = r.rows();
  if (static_cast<Eigen::Index>(sigmas.size()) != d)
    fail(ErrorCode::DomainError, "gk_montecarlo: sigma vector does not match R");
  if (k < 1 || k > d) fail(ErrorCode::IndexError, "gk_montecarlo: k outside [1, d]");
  if (reps < 1) fail(ErrorCode::DomainError, "gk_montecarlo: reps must be positive");
  const CholeskyFactor factor = cholesky(r);

  std::vector<long> below(ts.size(), 0);
  std::vector<long> few_exceed(ts.size(), 0);
  constexpr int kBatch = 4096;
  std::vector<double> row(static_cast<std::size_t>(d));
  for (int start = 0, batch = 0; start < reps; start += kBatch, ++batch) {
    const int size = std::min(kBatch, reps - start);
    RngStream stream = rng.substream(static_cast<std::uint64_t>(batch));
    const Matrix z = sample_latent_gaussian(size, factor, stream);
    for (int i = 0; i < size; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) row[j] = z(i, j) * sigmas[j];
      const double t_k = kth_order_stat(row, k);
      for (std::size_t g = 0; g < ts.size(); ++g) {
        if (t_k <= ts[g]) ++below[g];
        if (exceedance_count(row, ts[g]) <= k - 1) ++few_exceed[g];
      }
    }
  }

  std::vector<MonteCarloEstimate> out(ts.size());
  for (std::size_t g = 0; g < ts.size(); ++g) {
    const double p = static_cast<double>(below[g]) / reps;
    out[g].estimate = p;
    out[g].se = std::sqrt(p * (1.0 - p) / reps);
    out[g].estimate_via_counts = static_cast<double>(few_exceed[g]) / reps;
  }
  return out;
}

MonteCarloEstimate gk_montecarlo(double t, const Matrix& r, int k, int reps, const RngStream& rng) {
  const std::vector<double> sigmas(static_cast<std::size_t>(r.rows()), 1.0);
  return gk_montecarlo_grid({t}, r, sigmas, k, reps, rng).front();
}

PoissonGap poisson_gap(double t, const GaussianMarginals& marg, int k, const Matrix& r, int reps,
                       const RngStream& rng, double bound_constant) {
  const int d = marg.d();
  const MonteCarloEstimate mc = gk_montecarlo_grid({t}, r, marg.sigmas, k, reps, rng).front();
  PoissonGap out;
  out.lambda = lambda_t(t, marg);
  out.gap = std::abs(mc.estimate - hk(k, out.lambda));
  out.gap_se = mc.se;

  double rho_d = 0.0;
  for (Eigen::Index j = 0; j < r.rows(); ++j)
    for (Eigen::Index l = 0; l < j; ++l) rho_d = std::max(rho_d, std::abs(r(j, l)));
  const double a_sigma = (marg.sigma_lower * marg.sigma_lower) / (marg.sigma_upper * marg.sigma_upper);
  const double log_d = std::log(static_cast<double>(std::max(d, 3)));
  out.bound = bound_constant * (std::pow(static_cast<double>(d), -a_sigma) / std::sqrt(log_d) + rho_d * log_d);
  out.exceeds_bound = out.gap > out.bound;
  return out;
}

double berman_bound(const Matrix& r, const std::vector<double>& u) {
  const auto s = r.rows();
  if (r.cols() != s || static_cast<Eigen::Index>(u.size()) != s)
    fail(ErrorCode::DomainError, "berman_bound: dimension mismatch");
  double rho_bar = 0.0;
  for (Eigen::Index j = 0; j < s; ++j)
    for (Eigen::Index l = j + 1; l < s; ++l) rho_bar = std::max(rho_bar, std::abs(r(j, l)));
  if (!(rho_bar < 1.0)) fail(ErrorCode::DomainError, "berman_bound: maximal correlation must be below 1");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < s; ++j)
    for (Eigen::Index l = j + 1; l < s; ++l)
      sum += std::abs(r(j, l)) * std::exp(-(u[j] * u[j] + u[l] * u[l]) / (2.0 * (1.0 + rho_bar)));
  return sum / (2.0 * M_PI * std::sqrt(1.0 - rho_bar * rho_bar));
}

}  // namespace kboot
