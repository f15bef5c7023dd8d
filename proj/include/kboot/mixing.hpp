#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kboot/rng.hpp"

namespace kboot {

struct DependenceParams {
  double theta_star = 0.0;
  double beta_star = 1.0;
};

// theta* = 1 - sigma*^2 / sigma_bar^2, beta* = (1 - theta*) / (1 + theta*).
DependenceParams dependence_params(double sigma_star, double sigma_bar);

struct MixingParams {
  double C_alpha = 1.0;
  double a_alpha = 1.0;  // +inf allowed (independent coordinates)
  double sigma_star = 1.0;
  double sigma_bar = 1.0;
  std::int64_t d = 1;
  std::int64_t n = 1;
  int k0 = 2;
  int k = 1;
  double eps = 0.1;

  void validate() const;
  DependenceParams dependence() const { return dependence_params(sigma_star, sigma_bar); }

  // Stationary AR(1) with coefficient rho: a_alpha = -log|rho|, C_alpha = 1,
  // sigma*^2 = sigma^2 (1 - |rho|).
  static MixingParams ar1(double rho, double sigma, std::int64_t d, std::int64_t n, int k0, int k, double eps);
};

// Half-open index range [begin, end), 0-based.
struct IndexRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  std::int64_t size() const { return end - begin; }
};

struct BlockLayout {
  std::int64_t d = 0;
  std::int64_t m_d = 0;
  std::int64_t ell_d = 0;
  std::int64_t q_d = 0;
  std::int64_t s_d = 0;
  std::vector<IndexRange> main_blocks;
  std::vector<IndexRange> gaps;
  IndexRange remainder;
  bool degenerate = false;  // q_d = 0
};

// Real-valued block lengths, usable for d far beyond 64-bit range.
struct BlockLengths {
  double m = 0.0;
  double ell = 0.0;
  double q = 0.0;
};

BlockLengths block_lengths(const MixingParams& params, double d);

// m_d = ceil(d^{beta*/4}), ell_d = ceil((8 (k0 + 2) log(2d) + 8 log n) / a_alpha), q_d = floor(d / (m_d + ell_d)).
BlockLayout block_layout(const MixingParams& params);
BlockLayout explicit_layout(std::int64_t d, std::int64_t m, std::int64_t ell);

struct RemainderBreakdown {
  double eta1 = 0.0;
  double inv_qd = 0.0;
  double mixing_term = 0.0;
  double log10_mixing_term = 0.0;
  double poisson_tail = 0.0;
  double log10_poisson_tail = 0.0;
  double lambda_eps = 0.0;
  double r_d = 0.0;
  bool degenerate = false;  // inv_qd and r_d are NaN
};

// log of C_alpha d^{k0+1} e^{-a_alpha ell}.
double log_mixing_bound(const MixingParams& params, double d, double ell);

// Every component that is defined for the layout; never throws on q_d = 0.
RemainderBreakdown remainder_components(const MixingParams& params, const BlockLayout& layout);
// DegenerateLayout when q_d = 0.
RemainderBreakdown remainder_rd(const MixingParams& params, const BlockLayout& layout);
// Same quantity with d treated as a real number.
RemainderBreakdown remainder_rd_at(const MixingParams& params, double d);

struct ClusterTail {
  double bound = 0.0;
  double mills_bound = 0.0;
};

ClusterTail cluster_tail_bound(int m, double t, double sigma, double theta_star);

struct BlockExceedance {
  std::int64_t n_d = 0;
  std::int64_t s_d = 0;
  bool mismatch = false;
};

// LengthError when the path is shorter than q_d (m_d + ell_d).
BlockExceedance block_exceedance_compare(std::span<const double> path, const BlockLayout& layout, double t);

// (q_d ell_d + s_d) p(t) + q_d C(m_d, 2) Phi_bar(sqrt(2 / (1 + theta*)) t / sigma), p(t) = Phi_bar(t / sigma).
double bad_event_bound(const BlockLayout& layout, double t, double sigma, double theta_star);

struct PoissonWindowRow {
  double t = 0.0;
  double lambda = 0.0;  // d Phi_bar(t / sigma)
  double lambda_hat = 0.0;  // lambda_t on equal marginals
  double gk_hat = 0.0;
  double gk_se = 0.0;
  double hk = 0.0;
  double gap = 0.0;
};

struct PoissonWindowReport {
  std::vector<PoissonWindowRow> rows;
  double max_gap = 0.0;
  double bound = 0.0;  // C r_d, NaN when the layout is degenerate
  bool degenerate = false;
};

// AR(1) paths of length d; G_k(t) estimated on a grid with lambda(t) between
// the (1 - eps/2)-level of h_k and 2 Lambda_{k,eps}.
PoissonWindowReport poisson_window_check(double rho, double sigma, std::int64_t d, std::int64_t n, int k, int k0,
                                         double eps, int reps, const RngStream& rng, double bound_constant = 1.0,
                                         int grid = 9);

}  // namespace kboot
