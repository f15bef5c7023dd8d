#pragma once

// Independent quadrature oracle for the diagonal Edgeworth corrections in two
// dimensions, shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kboot/edgeworth.hpp"

namespace kboot::oracle {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Hermite forms of the N(0, s^2) density derivatives, written independently of the library.
inline double dens(double x, double s) { return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * M_PI)); }
inline double dens_d2(double x, double s) {
  const double z = x / s;
  return (z * z - 1.0) * dens(x, s) / (s * s);
}
inline double dens_d3(double x, double s) {
  const double z = x / s;
  return -(z * z * z - 3.0 * z) * dens(x, s) / (s * s * s);
}

struct Case {
  std::vector<double> sigma;
  std::vector<double> kappa;
  std::vector<double> v;
  double gamma = 1.0;
  int n = 50;
};

// Edgeworth-corrected density on R^2 minus the Gaussian density.
inline double corr_density(double x1, double x2, const Case& s, bool bootstrap) {
  const double scale = 1.0 / (6.0 * std::sqrt(static_cast<double>(s.n)));
  const double g = bootstrap ? s.gamma : 1.0;
  const double p1 = dens(x1, s.sigma[0]);
  const double p2 = dens(x2, s.sigma[1]);
  double out = -g * scale * (s.kappa[0] * dens_d3(x1, s.sigma[0]) * p2 + s.kappa[1] * p1 * dens_d3(x2, s.sigma[1]));
  if (bootstrap) out += 0.5 * (s.v[0] * dens_d2(x1, s.sigma[0]) * p2 + s.v[1] * p1 * dens_d2(x2, s.sigma[1]));
  return out;
}

inline double integrate_2d(double lo1, double hi1, double lo2, double hi2, const Case& s, bool bootstrap) {
  auto outer = [&](double x1) {
    auto inner = [&](double x2) { return corr_density(x1, x2, s, bootstrap); };
    return GK::integrate(inner, lo2, hi2, 15, 1e-13);
  };
  return GK::integrate(outer, lo1, hi1, 15, 1e-13);
}

// -sum_{s=1}^{2} w(s,1) (M_{n,s} - M_{Z,s}) for d = 2 by brute-force quadrature.
inline double q_quadrature(double t, const Case& s, bool bootstrap) {
  const double far = 14.0 * std::max(s.sigma[0], s.sigma[1]);
  const double m1 = integrate_2d(t, t + far, -far, far, s, bootstrap) +
                    integrate_2d(-far, far, t, t + far, s, bootstrap);
  const double m2 = integrate_2d(t, t + far, t, t + far, s, bootstrap);
  return -(m1 - m2);
}

inline EdgeworthInputs inputs_of(const Case& s, int k0) {
  EdgeworthInputs in;
  in.third_cumulants = s.kappa;
  in.var_devs = s.v;
  in.gamma = s.gamma;
  in.n = s.n;
  in.k0 = k0;
  return in;
}

}  // namespace kboot::oracle
