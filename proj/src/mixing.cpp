#include "kboot/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kboot/error.hpp"
#include "kboot/gaussian_reference.hpp"
#include "kboot/poisson.hpp"
#include "kboot/sampling.hpp"
#include "kboot/special.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

DependenceParams dependence_params(double sigma_star, double sigma_bar) {
  if (!(sigma_star > 0.0 && sigma_star <= sigma_bar))
    fail(ErrorCode::DomainError, "dependence_params: need 0 < sigma_star <= sigma_bar");
  DependenceParams out;
  out.theta_star = 1.0 - (sigma_star * sigma_star) / (sigma_bar * sigma_bar);
  out.beta_star = (1.0 - out.theta_star) / (1.0 + out.theta_star);
  return out;
}

void MixingParams::validate() const {
  if (!(C_alpha >= 1.0)) fail(ErrorCode::DomainError, "MixingParams: C_alpha must be at least 1");
  if (!(a_alpha > 0.0)) fail(ErrorCode::DomainError, "MixingParams: a_alpha must be positive");
  if (d < 1 || n < 1) fail(ErrorCode::DomainError, "MixingParams: d and n must be positive");
  if (k < 1 || k0 < k) fail(ErrorCode::DomainError, "MixingParams: need 1 <= k <= k0");
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorCode::DomainError, "MixingParams: eps must lie in (0, 1/2)");
  dependence_params(sigma_star, sigma_bar);
}

MixingParams MixingParams::ar1(double rho, double sigma, std::int64_t d, std::int64_t n, int k0, int k, double eps) {
  if (!(std::abs(rho) < 1.0)) fail(ErrorCode::DomainError, "MixingParams::ar1: need |rho| < 1");
  MixingParams p;
  p.C_alpha = 1.0;
  p.a_alpha = rho == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(std::abs(rho));
  p.sigma_bar = sigma;
  p.sigma_star = sigma * std::sqrt(1.0 - std::abs(rho));
  p.d = d;
  p.n = n;
  p.k0 = k0;
  p.k = k;
  p.eps = eps;
  p.validate();
  return p;
}

BlockLengths block_lengths(const MixingParams& params, double d) {
  params.validate();
  const double beta = params.dependence().beta_star;
  BlockLengths out;
  out.m = std::ceil(std::pow(d, beta / 4.0) - 1e-9);
  const double numerator = 8.0 * (params.k0 + 2) * std::log(2.0 * d) + 8.0 * std::log(static_cast<double>(params.n));
  out.ell = std::isinf(params.a_alpha) ? 0.0 : std::ceil(numerator / params.a_alpha);
  out.q = std::floor(d / (out.m + out.ell));
  return out;
}

namespace {

BlockLayout build_layout(std::int64_t d, std::int64_t m, std::int64_t ell) {
  BlockLayout out;
  out.d = d;
  out.m_d = m;
  out.ell_d = ell;
  out.q_d = d / (m + ell);
  out.s_d = d - out.q_d * (m + ell);
  out.degenerate = out.q_d == 0;
  for (std::int64_t r = 0; r < out.q_d; ++r) {
    const std::int64_t start = r * (m + ell);
    out.main_blocks.push_back({start, start + m});
    out.gaps.push_back({start + m, start + m + ell});
  }
  out.remainder = {out.q_d * (m + ell), d};
  return out;
}

RemainderBreakdown assemble(const MixingParams& params, double d, double m, double ell, double q) {
  const double beta = params.dependence().beta_star;
  const double log_d = std::log(d);
  RemainderBreakdown out;
  out.eta1 = ell / m + (m + ell) / d + std::pow(d, -0.75 * beta) / std::sqrt(log_d);
  out.degenerate = q < 1.0;
  out.inv_qd = out.degenerate ? std::numeric_limits<double>::quiet_NaN() : 1.0 / q;

  const double log_mixing = log_mixing_bound(params, d, ell);
  out.log10_mixing_term = log_mixing / std::log(10.0);
  out.mixing_term = std::exp(log_mixing);

  out.lambda_eps = solve_lambda_eps(params.k, params.eps);
  const double log_tail = (params.k0 + 1) * std::log(3.0 * out.lambda_eps) - std::lgamma(params.k0 + 2.0);
  out.log10_poisson_tail = log_tail / std::log(10.0);
  out.poisson_tail = std::exp(log_tail);

  out.r_d = out.eta1 + out.inv_qd + out.mixing_term + out.poisson_tail;
  return out;
}

}  // namespace

double log_mixing_bound(const MixingParams& params, double d, double ell) {
  if (std::isinf(params.a_alpha)) return -std::numeric_limits<double>::infinity();
  return (params.k0 + 1) * std::log(d) + std::log(params.C_alpha) - params.a_alpha * ell;
}

RemainderBreakdown remainder_components(const MixingParams& params, const BlockLayout& layout) {
  params.validate();
  return assemble(params, static_cast<double>(layout.d), static_cast<double>(layout.m_d),
                  static_cast<double>(layout.ell_d), static_cast<double>(layout.q_d));
}

BlockLayout block_layout(const MixingParams& params) {
  const BlockLengths len = block_lengths(params, static_cast<double>(params.d));
  return build_layout(params.d, static_cast<std::int64_t>(len.m), static_cast<std::int64_t>(len.ell));
}

BlockLayout explicit_layout(std::int64_t d, std::int64_t m, std::int64_t ell) {
  if (d < 1 || m < 1 || ell < 0) fail(ErrorCode::DomainError, "explicit_layout: need d, m >= 1 and ell >= 0");
  return build_layout(d, m, ell);
}

RemainderBreakdown remainder_rd(const MixingParams& params, const BlockLayout& layout) {
  params.validate();
  if (layout.degenerate || layout.q_d == 0)
    fail(ErrorCode::DegenerateLayout, "remainder_rd: q_d = 0, the block layout is degenerate");
  return remainder_components(params, layout);
}

RemainderBreakdown remainder_rd_at(const MixingParams& params, double d) {
  if (!(d >= 2.0)) fail(ErrorCode::DomainError, "remainder_rd_at: d must be at least 2");
  const BlockLengths len = block_lengths(params, d);
  const RemainderBreakdown out = assemble(params, d, len.m, len.ell, len.q);
  if (out.degenerate) fail(ErrorCode::DegenerateLayout, "remainder_rd_at: q_d = 0, the block layout is degenerate");
  return out;
}

ClusterTail cluster_tail_bound(int m, double t, double sigma, double theta_star) {
  if (m < 2) fail(ErrorCode::DomainError, "cluster_tail_bound: m must be at least 2");
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "cluster_tail_bound: t must be positive");
  if (!(sigma > 0.0)) fail(ErrorCode::DomainError, "cluster_tail_bound: sigma must be positive");
  if (!(theta_star >= 0.0 && theta_star < 1.0))
    fail(ErrorCode::DomainError, "cluster_tail_bound: theta_star must lie in [0, 1)");
  const double x = std::sqrt(m / (1.0 + (m - 1) * theta_star)) * t / sigma;
  return {normal_sf(x), normal_pdf(x) / x};
}

BlockExceedance block_exceedance_compare(std::span<const double> path, const BlockLayout& layout, double t) {
  const std::int64_t needed = layout.q_d * (layout.m_d + layout.ell_d);
  if (static_cast<std::int64_t>(path.size()) < needed)
    fail(ErrorCode::LengthError, "block_exceedance_compare: path shorter than the block layout");
  BlockExceedance out;
  out.n_d = exceedance_count(path, t);
  for (const IndexRange& block : layout.main_blocks) {
    const auto first = path.begin() + block.begin;
    if (*std::max_element(first, first + block.size()) > t) ++out.s_d;
  }
  out.mismatch = out.n_d != out.s_d;
  return out;
}

double bad_event_bound(const BlockLayout& layout, double t, double sigma, double theta_star) {
  const double p = normal_sf(t / sigma);
  const double pair = normal_sf(std::sqrt(2.0 / (1.0 + theta_star)) * t / sigma);
  return static_cast<double>(layout.q_d * layout.ell_d + layout.s_d) * p +
         static_cast<double>(layout.q_d) * binomial(layout.m_d, 2) * pair;
}

PoissonWindowReport poisson_window_check(double rho, double sigma, std::int64_t d, std::int64_t n, int k, int k0,
                                         double eps, int reps, const RngStream& rng, double bound_constant,
                                         int grid) {
  if (reps < 1 || grid < 2) fail(ErrorCode::DomainError, "poisson_window_check: need reps >= 1 and grid >= 2");
  if (d < k) fail(ErrorCode::DomainError, "poisson_window_check: need d >= k");
  const MixingParams params = MixingParams::ar1(rho, sigma, d, n, k0, k, eps);

  // lower end: h_k(lambda_lo) = 1 - eps/2
  const double target = 1.0 - 0.5 * eps;
  double lo = 0.0;
  double hi = 1.0;
  while (hk(k, hi) > target) hi *= 2.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hk(k, mid) > target) lo = mid; else hi = mid;
  }
  const double lambda_lo = 0.5 * (lo + hi);
  const double lambda_hi = std::min(2.0 * solve_lambda_eps(k, eps), 0.5 * static_cast<double>(d));

  PoissonWindowReport report;
  const GaussianMarginals marg = GaussianMarginals::equal(static_cast<int>(d), sigma);
  std::vector<double> ts(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g) {
    const double lambda = lambda_lo + (lambda_hi - lambda_lo) * g / (grid - 1);
    ts[g] = -sigma * normal_quantile(lambda / static_cast<double>(d));
  }

  std::vector<long> below(ts.size(), 0);
  for (int r = 0; r < reps; ++r) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(r));
    const std::vector<double> path = sample_ar1_path(static_cast<int>(d), rho, sigma, stream);
    for (std::size_t g = 0; g < ts.size(); ++g)
      if (exceedance_count(path, ts[g]) <= k - 1) ++below[g];
  }

  for (std::size_t g = 0; g < ts.size(); ++g) {
    PoissonWindowRow row;
    row.t = ts[g];
    row.lambda = static_cast<double>(d) * normal_sf(ts[g] / sigma);
    row.lambda_hat = lambda_t(ts[g], marg);
    row.gk_hat = static_cast<double>(below[g]) / reps;
    row.gk_se = std::sqrt(row.gk_hat * (1.0 - row.gk_hat) / reps);
    row.hk = hk(k, row.lambda);
    row.gap = std::abs(row.gk_hat - row.hk);
    report.max_gap = std::max(report.max_gap, row.gap);
    report.rows.push_back(row);
  }

  const BlockLayout layout = block_layout(params);
  report.degenerate = layout.degenerate;
  report.bound = layout.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                   : bound_constant * remainder_rd(params, layout).r_d;
  return report;
}

}  // namespace kboot
