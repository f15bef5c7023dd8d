#include "kboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kboot/error.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

namespace {

void check_replicates(int B, int k, Eigen::Index d) {
  if (B < 1) fail(ErrorCode::DomainError, "bootstrap: B must be at least 1");
  if (k < 1 || k > d) fail(ErrorCode::IndexError, "bootstrap: k outside [1, d]");
}

BootstrapDraws finish(std::vector<double> stats, int k, std::optional<MultiplierLaw> law,
                      std::uint64_t key) {
  std::sort(stats.begin(), stats.end());
  return BootstrapDraws{std::move(stats), k, std::move(law), key};
}

}  // namespace

Matrix center_rows(const Matrix& x) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  return x.rowwise() - mean;
}

std::vector<double> weighted_order_stats(const Matrix& centered, const Matrix& weights, int k) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(centered.rows()));
  const Matrix sums = (centered.transpose() * weights) * scale;  // d x B
  const auto d = sums.rows();
  std::vector<double> out(static_cast<std::size_t>(sums.cols()));
  std::vector<double> column(static_cast<std::size_t>(d));
  for (Eigen::Index b = 0; b < sums.cols(); ++b) {
    const double* col = sums.col(b).data();
    if (k == 1) {
      out[b] = *std::max_element(col, col + d);
      continue;
    }
    std::copy(col, col + d, column.begin());
    auto nth = column.begin() + (k - 1);
    std::nth_element(column.begin(), nth, column.end(), std::greater<>());
    out[b] = *nth;
  }
  return out;
}

Matrix multiplier_weights(const MultiplierLaw& law, int n, int B, const RngStream& rng) {
  Matrix w(n, B);
  for (int b = 0; b < B; ++b) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(b));
    double* col = w.col(b).data();
    for (int i = 0; i < n; ++i) col[i] = law.sample(stream);
  }
  return w;
}

Matrix resample_counts(int n, int B, const RngStream& rng) {
  Matrix c = Matrix::Zero(n, B);
  for (int b = 0; b < B; ++b) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(b));
    double* col = c.col(b).data();
    for (int i = 0; i < n; ++i) col[stream.uniform_index(static_cast<std::uint64_t>(n))] += 1.0;
  }
  return c;
}

BootstrapDraws wild_bootstrap_draws(const Matrix& x, const MultiplierLaw& law, int B, int k,
                                    const RngStream& rng) {
  check_replicates(B, k, x.cols());
  const Matrix centered = center_rows(x);
  const Matrix w = multiplier_weights(law, static_cast<int>(x.rows()), B, rng);
  return finish(weighted_order_stats(centered, w, k), k, law, rng.key());
}

BootstrapDraws empirical_bootstrap_draws(const Matrix& x, int B, int k, const RngStream& rng) {
  check_replicates(B, k, x.cols());
  // sum_i (X*_i - X_bar) = sum_i c_i (X_i - X_bar) with multiplicities c_i
  const Matrix centered = center_rows(x);
  const Matrix counts = resample_counts(static_cast<int>(x.rows()), B, rng);
  return finish(weighted_order_stats(centered, counts, k), k, std::nullopt, rng.key());
}

double critical_value(const BootstrapDraws& draws, double p) {
  if (draws.stats.empty()) fail(ErrorCode::EmptyInput, "critical_value: no replicates");
  if (!(p > 0.0 && p <= 1.0)) fail(ErrorCode::DomainError, "critical_value: p must lie in (0, 1]");
  return ecdf_quantile_sorted(draws.stats, p);
}

DoubleBootOutcome double_bootstrap(const Matrix& x, const MultiplierLaw& outer_law,
                                   const MultiplierLaw& inner_law, int B1, int B2, double alpha,
                                   int k, const RngStream& rng) {
  if (!inner_law.matches_third_moment())
    fail(ErrorCode::InvalidSecondLevelLaw,
         "double_bootstrap: second-level law " + inner_law.name() + " does not have E v^3 = 1");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::DomainError, "double_bootstrap: alpha must lie in (0, 1)");
  check_replicates(B1, k, x.cols());
  check_replicates(B2, k, x.cols());

  const int n = static_cast<int>(x.rows());
  const Matrix centered = center_rows(x);
  const Matrix w = multiplier_weights(outer_law, n, B1, rng);
  const std::vector<double> outer = weighted_order_stats(centered, w, k);

  const RngStream inner_root(derive_key({rng.key(), kInnerStreamTag}));
  DoubleBootOutcome result;
  result.u_values.resize(static_cast<std::size_t>(B1));
  Matrix resampled(centered.rows(), centered.cols());
  for (int b = 0; b < B1; ++b) {
    // X*_i = w_i (X_i - X_bar), then center at X_bar*
    resampled = w.col(b).asDiagonal() * centered;
    const Matrix inner_centered = center_rows(resampled);
    const Matrix v = multiplier_weights(inner_law, n, B2, inner_root.substream(static_cast<std::uint64_t>(b)));
    const std::vector<double> inner = weighted_order_stats(inner_centered, v, k);
    const double t_star = outer[b];
    const auto below = std::count_if(inner.begin(), inner.end(), [t_star](double t) { return t <= t_star; });
    result.u_values[b] = static_cast<double>(below) / static_cast<double>(B2);
  }

  // A zero quantile would select no replicate; the smallest usable level is 1/B1.
  result.beta_hat = std::max(ecdf_quantile(result.u_values, 1.0 - alpha), 1.0 / B1);
  result.outer = finish(outer, k, outer_law, rng.key());
  result.critical = critical_value(result.outer, result.beta_hat);
  return result;
}

}  // namespace kboot
