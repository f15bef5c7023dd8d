#include "kboot/multipliers.hpp"

#include <cmath>
#include <fmt/format.h>

#include "kboot/error.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

BetaShape beta_shape(double nu) {
  if (!(nu > 0.0)) fail(ErrorCode::DomainError, "beta multiplier needs nu > 0");
  BetaShape s;
  s.c = nu * nu + 20.0 * nu + 20.0;
  const double ratio = (nu + 2.0) / std::sqrt(s.c);
  s.alpha = 0.5 * nu * (1.0 - ratio);
  s.beta = 0.5 * nu * (1.0 + ratio);
  const double total = s.alpha + s.beta;
  s.mean = s.alpha / total;
  s.sd = std::sqrt(s.alpha * s.beta / (total * total * (total + 1.0)));
  return s;
}

MultiplierLaw::MultiplierLaw(MultiplierKind kind, double nu) : kind_(kind), nu_(nu) {
  if (kind_ == MultiplierKind::Beta) shape_ = beta_shape(nu_);
}

MultiplierLaw MultiplierLaw::beta(double nu) { return MultiplierLaw(MultiplierKind::Beta, nu); }

std::string MultiplierLaw::name() const {
  switch (kind_) {
    case MultiplierKind::Gaussian: return "gaussian";
    case MultiplierKind::Mammen: return "mammen";
    case MultiplierKind::Rademacher: return "rademacher";
    case MultiplierKind::Beta: return fmt::format("beta({})", nu_);
  }
  return "unknown";
}

double MultiplierLaw::raw_moment(int m) const {
  if (m < 0) fail(ErrorCode::DomainError, "raw_moment: negative order");
  switch (kind_) {
    case MultiplierKind::Gaussian: {
      if (m % 2 == 1) return 0.0;
      double out = 1.0;  // (m - 1)!!
      for (int j = m - 1; j > 1; j -= 2) out *= j;
      return out;
    }
    case MultiplierKind::Rademacher:
      return m % 2 == 0 ? 1.0 : 0.0;
    case MultiplierKind::Mammen:
      return kMammenHighProb * std::pow(kMammenHigh, m) +
             (1.0 - kMammenHighProb) * std::pow(kMammenLow, m);
    case MultiplierKind::Beta: {
      // E eta^r = prod_{q<r} (alpha + q) / (alpha + beta + q), then expand (eta - mean)^m.
      const double total = shape_.alpha + shape_.beta;
      double central = 0.0;
      double eta_moment = 1.0;
      for (int r = 0; r <= m; ++r) {
        if (r > 0) eta_moment *= (shape_.alpha + r - 1) / (total + r - 1);
        central += binomial(m, r) * eta_moment * std::pow(-shape_.mean, m - r);
      }
      return central / std::pow(shape_.sd, m);
    }
  }
  return 0.0;
}

bool MultiplierLaw::matches_third_moment() const { return std::abs(gamma() - 1.0) < 1e-9; }

double MultiplierLaw::sample(RngStream& rng) const {
  switch (kind_) {
    case MultiplierKind::Gaussian:
      return rng.normal();
    case MultiplierKind::Rademacher:
      return (rng.next_u32() & 1u) ? 1.0 : -1.0;
    case MultiplierKind::Mammen:
      return rng.uniform() < kMammenHighProb ? kMammenHigh : kMammenLow;
    case MultiplierKind::Beta: {
      double eta;
      if (shape_.alpha < 1.0 && shape_.beta < 1.0) {
        // Johnk's algorithm in log space
        for (;;) {
          const double lx = std::log(rng.uniform()) / shape_.alpha;
          const double ly = std::log(rng.uniform()) / shape_.beta;
          const double top = std::max(lx, ly);
          const double log_sum = top + std::log(std::exp(lx - top) + std::exp(ly - top));
          if (log_sum <= 0.0) {
            eta = 1.0 / (1.0 + std::exp(ly - lx));
            break;
          }
        }
      } else {
        const double lx = rng.log_gamma_variate(shape_.alpha);
        const double ly = rng.log_gamma_variate(shape_.beta);
        eta = 1.0 / (1.0 + std::exp(ly - lx));
      }
      return (eta - shape_.mean) / shape_.sd;
    }
  }
  return 0.0;
}

}  // namespace kboot
