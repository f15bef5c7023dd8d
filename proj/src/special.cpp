#include "kboot/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kboot/error.hpp"

namespace kboot {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

template <std::size_t N>
double horner(const double (&c)[N], double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Newton on the lower (upper = false) or upper regularized incomplete gamma.
// `target` is p for the lower formulation and q = 1 - p for the upper one.
double solve_gamma_tail(double target, double shape, bool upper) {
  auto residual = [&](double x) {
    return upper ? target - boost::math::gamma_q(shape, x)
                 : boost::math::gamma_p(shape, x) - target;
  };

  const double p_lower = upper ? 1.0 - target : target;
  double x;
  // Wilson-Hilferty start, with the small-x series start when it fails.
  {
    const double z = upper ? -normal_quantile(target) : normal_quantile(target);
    const double c = 1.0 / (9.0 * shape);
    const double wh = shape * std::pow(1.0 - c + z * std::sqrt(c), 3);
    const double small = std::pow(p_lower * std::tgamma(shape + 1.0), 1.0 / shape);
    x = wh > 0.0 ? wh : small;
    if (!(x > 0.0) || !std::isfinite(x)) x = shape;
  }

  double lo = 0.0;
  double hi = std::max(1.0, shape);
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  if (x <= lo || x >= hi) x = 0.5 * (lo + hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double r = residual(x);
    if (r == 0.0) return x;
    if (r < 0.0) lo = x; else hi = x;
    const double density = boost::math::gamma_p_derivative(shape, x);
    double next = (density > 0.0 && std::isfinite(density)) ? x - r / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-14 * x || hi - lo <= 1e-15 * hi) break;
  }
  return x;
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kSqrt1_2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x * kSqrt1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "normal_quantile: p must lie in (0, 1)");

  static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                                 1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                 5.76949722146069140550e0, 3.64784832476320460504e0,
                                 1.27045825245236838258e0, 2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0, 1.67638483018380384940e0,
                                 6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                 1.78482653991729133580e0, 2.96560571828504891230e-1,
                                 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    val = horner(e, r) / horner(f, r);
  }
  return q < 0.0 ? -val : val;
}

double gamma_cdf(double x, double shape) {
  if (!(shape > 0.0)) fail(ErrorCode::DomainError, "gamma_cdf: shape must be positive");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x);
}

double gamma_pdf(double x, double shape) {
  if (!(shape > 0.0)) fail(ErrorCode::DomainError, "gamma_pdf: shape must be positive");
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p_derivative(shape, x);
}

double gamma_quantile(double p, double shape) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "gamma_quantile: p must lie in (0, 1)");
  if (!(shape > 0.0)) fail(ErrorCode::DomainError, "gamma_quantile: shape must be positive");
  return p <= 0.5 ? solve_gamma_tail(p, shape, false) : solve_gamma_tail(1.0 - p, shape, true);
}

double gamma_quantile_of_normal(double z, double shape) {
  if (!(shape > 0.0)) fail(ErrorCode::DomainError, "gamma_quantile_of_normal: shape must be positive");
  const bool upper = z > 0.0;
  const double tail = upper ? normal_sf(z) : normal_cdf(z);
  if (shape == 1.0) return upper ? -std::log(tail) : -std::log1p(-tail);
  if (shape == 0.5) {
    // P(1/2, x) = erf(sqrt(x))
    const double root = upper ? boost::math::erfc_inv(tail) : boost::math::erf_inv(tail);
    return root * root;
  }
  return solve_gamma_tail(tail, shape, upper);
}

}  // namespace kboot
