#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kboot/multipliers.hpp"
#include "kboot/sampling.hpp"

namespace kboot {

// Sorted replicates of T*_{n,[k]}. `law` is empty for the empirical bootstrap.
struct BootstrapDraws {
  std::vector<double> stats;
  int k = 1;
  std::optional<MultiplierLaw> law;
  std::uint64_t stream_key = 0;

  int B() const { return static_cast<int>(stats.size()); }
};

struct DoubleBootOutcome {
  double beta_hat = 1.0;
  double critical = 0.0;
  std::vector<double> u_values;
  BootstrapDraws outer;
};

// X - X_bar, rows are observations.
Matrix center_rows(const Matrix& x);

// k-th largest coordinate of n^{-1/2} sum_i weights(i, b) * centered.row(i),
// for every column b of `weights` (n x B). Unsorted, one entry per column.
std::vector<double> weighted_order_stats(const Matrix& centered, const Matrix& weights, int k);

// Replicate b draws w_1..w_n in row order from rng.substream(b).
Matrix multiplier_weights(const MultiplierLaw& law, int n, int B, const RngStream& rng);
// Replicate b draws n row indices with replacement from rng.substream(b) and
// stores the multiplicities.
Matrix resample_counts(int n, int B, const RngStream& rng);

BootstrapDraws wild_bootstrap_draws(const Matrix& x, const MultiplierLaw& law, int B, int k,
                                    const RngStream& rng);
inline BootstrapDraws wild_bootstrap_draws(const DataMatrix& x, const MultiplierLaw& law, int B,
                                           int k, const RngStream& rng) {
  return wild_bootstrap_draws(x.values, law, B, k, rng);
}

// Naive bootstrap; replicates are centered at the original sample mean.
BootstrapDraws empirical_bootstrap_draws(const Matrix& x, int B, int k, const RngStream& rng);
inline BootstrapDraws empirical_bootstrap_draws(const DataMatrix& x, int B, int k,
                                                const RngStream& rng) {
  return empirical_bootstrap_draws(x.values, B, k, rng);
}

// c_hat_{p,k} = inf{t : F_hat(t) >= p}.
double critical_value(const BootstrapDraws& draws, double p);

// Inner replicates of outer replicate b draw from
// RngStream(derive_key({rng.key(), kInnerStreamTag})).substream(b).
inline constexpr std::uint64_t kInnerStreamTag = 0x494E4E4552ULL;

// Prepivoted double wild bootstrap. Outer replicate b uses rng.substream(b);
// its inner replicates use an independent family of substreams.
DoubleBootOutcome double_bootstrap(const Matrix& x, const MultiplierLaw& outer_law,
                                   const MultiplierLaw& inner_law, int B1, int B2, double alpha,
                                   int k, const RngStream& rng);
inline DoubleBootOutcome double_bootstrap(const DataMatrix& x, const MultiplierLaw& outer_law,
                                          const MultiplierLaw& inner_law, int B1, int B2,
                                          double alpha, int k, const RngStream& rng) {
  return double_bootstrap(x.values, outer_law, inner_law, B1, B2, alpha, k, rng);
}

}  // namespace kboot
