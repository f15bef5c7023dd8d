#pragma once

namespace kboot {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
// 1 - Phi(x), accurate in the upper tail.
double normal_sf(double x) noexcept;
// Inverse of Phi on (0, 1); Wichura's AS241 (PPND16).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(shape, x).
double gamma_cdf(double x, double shape);
double gamma_pdf(double x, double shape);

// Quantile of Gamma(shape, 1). Bracketing plus safeguarded Newton on the
// regularized incomplete gamma, converged to 1e-10 relative.
double gamma_quantile(double p, double shape);

// F_theta^{-1}(Phi(z)) evaluated without forming Phi(z) explicitly, so the
// upper tail keeps full precision.
double gamma_quantile_of_normal(double z, double shape);

}  // namespace kboot
