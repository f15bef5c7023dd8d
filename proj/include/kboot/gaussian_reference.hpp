#pragma once

#include <vector>

#include "kboot/rng.hpp"
#include "kboot/sampling.hpp"

namespace kboot {

// Marginal standard deviations of the Gaussian reference vector, together
// with the common-scale bounds they must respect.
struct GaussianMarginals {
  std::vector<double> sigmas;
  double sigma_lower = 0.0;
  double sigma_upper = 0.0;

  static GaussianMarginals equal(int d, double sigma);
  static GaussianMarginals from_sigmas(std::vector<double> sigmas);
  static GaussianMarginals from_covariance(const Matrix& sigma);

  int d() const { return static_cast<int>(sigmas.size()); }
  void validate() const;
};

// Derivatives of the N(0, sigma^2) density.
double phi_sigma(double t, double sigma);
double phi_sigma_d1(double t, double sigma);
double phi_sigma_d2(double t, double sigma);
double phi_sigma_d3(double t, double sigma);

// lambda(t) = sum_j Phi_bar(t / sigma_j).
double lambda_t(double t, const GaussianMarginals& marg);

// Independent coordinates with common variance sigma^2.
double gk_independent(double t, int d, int k, double sigma);
double fk_independent(double t, int d, int k, double sigma);
double fk_prime_independent(double t, int d, int k, double sigma);
// c^G_{p,k} = G_k^{-1}(p), by bisection.
double gk_inverse_independent(double p, int d, int k, double sigma);

struct QuantileWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
  // t^2 / log d at each end; bounded above and below for the window.
  double scale_lo = 0.0;
  double scale_hi = 0.0;
};

// {c^G_{p,k} : p in [eps/2, 1 - eps/2]} for independent equal-variance coordinates.
QuantileWindow quantile_window(int k, double eps, int d, double sigma);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double se = 0.0;
  // Same draws, evaluated through P(N(t) <= k - 1).
  double estimate_via_counts = 0.0;
};

// MC estimate of G_k(t) = P(T_{Z,[k]} <= t) for Z ~ N(0, D R D) with D = diag(sigmas).
std::vector<MonteCarloEstimate> gk_montecarlo_grid(const std::vector<double>& ts, const Matrix& r,
                                                   const std::vector<double>& sigmas, int k, int reps,
                                                   const RngStream& rng);
MonteCarloEstimate gk_montecarlo(double t, const Matrix& r, int k, int reps, const RngStream& rng);

struct PoissonGap {
  double gap = 0.0;         // |G_k_hat(t) - h_k(lambda(t))|
  double gap_se = 0.0;
  double lambda = 0.0;
  double bound = 0.0;       // C (d^{-a_sigma} (log d)^{-1/2} + rho_d log d)
  bool exceeds_bound = false;
};

PoissonGap poisson_gap(double t, const GaussianMarginals& marg, int k, const Matrix& r, int reps,
                       const RngStream& rng, double bound_constant = 1.0);

// Normal comparison bound against independent coordinates, for a correlation matrix r.
double berman_bound(const Matrix& r, const std::vector<double>& u);

}  // namespace kboot
