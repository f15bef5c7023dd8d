#pragma once

#include <string>

#include "kboot/rng.hpp"

namespace kboot {

enum class MultiplierKind { Gaussian, Mammen, Rademacher, Beta };

// Shape parameters of the Beta multiplier:
// c = nu^2 + 20 nu + 20, alpha = nu/2 (1 - (nu+2)/sqrt(c)), beta = nu/2 (1 + (nu+2)/sqrt(c)).
struct BetaShape {
  double c = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double mean = 0.0;
  double sd = 0.0;

  friend bool operator==(const BetaShape&, const BetaShape&) = default;
};

BetaShape beta_shape(double nu);

// i.i.d. multiplier law with E w = 0 and E w^2 = 1.
class MultiplierLaw {
 public:
  static MultiplierLaw gaussian() { return MultiplierLaw(MultiplierKind::Gaussian, 0.0); }
  static MultiplierLaw mammen() { return MultiplierLaw(MultiplierKind::Mammen, 0.0); }
  static MultiplierLaw rademacher() { return MultiplierLaw(MultiplierKind::Rademacher, 0.0); }
  static MultiplierLaw beta(double nu = 0.1);

  MultiplierKind kind() const { return kind_; }
  double nu() const { return nu_; }
  std::string name() const;

  // Exact E w^m.
  double raw_moment(int m) const;
  // gamma = E w^3.
  double gamma() const { return raw_moment(3); }
  bool matches_third_moment() const;

  double sample(RngStream& rng) const;

  friend bool operator==(const MultiplierLaw&, const MultiplierLaw&) = default;

 private:
  MultiplierLaw(MultiplierKind kind, double nu);

  MultiplierKind kind_;
  double nu_;
  BetaShape shape_{};
};

// Two-point Mammen law.
inline constexpr double kMammenHigh = 1.6180339887498948482;   // (1 + sqrt 5) / 2
inline constexpr double kMammenLow = -0.6180339887498948482;   // -(sqrt 5 - 1) / 2
inline constexpr double kMammenHighProb = 0.27639320225002103036;  // (sqrt 5 - 1) / (2 sqrt 5)

}  // namespace kboot
