#include "kboot/edgeworth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "kboot/error.hpp"
#include "kboot/poisson.hpp"
#include "kboot/special.hpp"
#include "kboot/stats_core.hpp"

namespace kboot {

void EdgeworthInputs::validate(int d, int k) const {
  if (static_cast<int>(third_cumulants.size()) != d)
    fail(ErrorCode::DomainError, "EdgeworthInputs: third_cumulants length must equal d");
  if (!var_devs.empty() && static_cast<int>(var_devs.size()) != d)
    fail(ErrorCode::DomainError, "EdgeworthInputs: var_devs length must equal d");
  if (n < 1) fail(ErrorCode::DomainError, "EdgeworthInputs: n must be positive");
  if (k0 < k) fail(ErrorCode::DomainError, "EdgeworthInputs: need k0 >= k");
  for (double x : third_cumulants)
    if (!std::isfinite(x)) fail(ErrorCode::DomainError, "EdgeworthInputs: non-finite cumulant");
  for (double x : var_devs)
    if (!std::isfinite(x)) fail(ErrorCode::DomainError, "EdgeworthInputs: non-finite variance deviation");
}

EdgeworthInputs sample_edgeworth_inputs(const Matrix& x, const std::vector<double>& sigma_diag, double gamma, int k0) {
  const auto n = x.rows();
  const auto d = x.cols();
  if (n < 1) fail(ErrorCode::EmptyInput, "sample_edgeworth_inputs: no observations");
  if (static_cast<Eigen::Index>(sigma_diag.size()) != d)
    fail(ErrorCode::DomainError, "sample_edgeworth_inputs: sigma_diag length must equal d");
  const Matrix b = x.rowwise() - x.colwise().mean();
  EdgeworthInputs out;
  out.gamma = gamma;
  out.n = static_cast<int>(n);
  out.k0 = k0;
  out.third_cumulants.resize(static_cast<std::size_t>(d));
  out.var_devs.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    out.var_devs[j] = b.col(j).squaredNorm() / n - sigma_diag[j];
    out.third_cumulants[j] = b.col(j).array().cube().sum() / n;
  }
  return out;
}

int default_k0(double eps_n, double A) {
  if (!(eps_n > 0.0 && eps_n < 1.0)) fail(ErrorCode::DomainError, "default_k0: eps_n must lie in (0, 1)");
  if (!(A > 0.0)) fail(ErrorCode::DomainError, "default_k0: A must be positive");
  const int k0 = static_cast<int>(std::ceil(A * std::log(1.0 / eps_n)));
  return std::clamp(k0, 1, 40);
}

namespace {

// value + derivative in t
struct Dual {
  double v = 0.0;
  double d = 0.0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }

MomentTerms run_dp(double t, const EdgeworthInputs& inputs, const GaussianMarginals& marg, EdgeworthKind kind) {
  const int d = marg.d();
  inputs.validate(d, 1);
  const int top = inputs.k0;
  const double skew_scale = 1.0 / (6.0 * std::sqrt(static_cast<double>(inputs.n)));
  const double gamma = kind == EdgeworthKind::Data ? 1.0 : inputs.gamma;

  // E[m]: coefficient of x^m y^0, F[m]: coefficient of x^m y^1 in prod_l (1 + a_l x + c_l y).
  std::vector<Dual> e(static_cast<std::size_t>(top + 1));
  std::vector<Dual> f(static_cast<std::size_t>(top + 1));
  e[0] = {1.0, 0.0};

  for (int l = 0; l < d; ++l) {
    const double sigma = marg.sigmas[l];
    const Dual a{normal_sf(t / sigma), -phi_sigma(t, sigma)};
    Dual c{gamma * inputs.third_cumulants[l] * skew_scale * phi_sigma_d2(t, sigma),
           gamma * inputs.third_cumulants[l] * skew_scale * phi_sigma_d3(t, sigma)};
    if (kind == EdgeworthKind::Bootstrap && !inputs.var_devs.empty()) {
      const double v = inputs.var_devs[l];
      c = c + Dual{-0.5 * v * phi_sigma_d1(t, sigma), -0.5 * v * phi_sigma_d2(t, sigma)};
    }
    const int upper = std::min(top, l + 1);
    for (int m = upper; m >= 1; --m) {
      f[m] = f[m] + a * f[m - 1] + c * e[m];
      e[m] = e[m] + a * e[m - 1];
    }
    f[0] = f[0] + c * e[0];
  }

  MomentTerms out;
  out.m_z.assign(static_cast<std::size_t>(top + 1), 0.0);
  out.m_z_prime.assign(static_cast<std::size_t>(top + 1), 0.0);
  out.diff.assign(static_cast<std::size_t>(top + 1), 0.0);
  out.diff_prime.assign(static_cast<std::size_t>(top + 1), 0.0);
  for (int s = 0; s <= top; ++s) {
    out.m_z[s] = e[s].v;
    out.m_z_prime[s] = e[s].d;
    if (s >= 1) {
      out.diff[s] = f[s - 1].v;
      out.diff_prime[s] = f[s - 1].d;
    }
  }
  return out;
}

QValue assemble_q(int k, const MomentTerms& terms, int k0) {
  QValue q;
  for (int s = k; s <= k0; ++s) {
    const double w = inclusion_exclusion_weight(s, k);
    q.value -= w * terms.diff[s];
    q.derivative -= w * terms.diff_prime[s];
  }
  return q;
}

GaussianMarginals diagonal_marginals(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols()) fail(ErrorCode::DomainError, "covariance must be square");
  for (Eigen::Index j = 0; j < sigma.rows(); ++j)
    for (Eigen::Index l = 0; l < sigma.cols(); ++l)
      if (j != l && sigma(j, l) != 0.0)
        fail(ErrorCode::NotDiagonal, "closed-form corrections need a diagonal covariance; use m_ns_mc_oracle");
  return GaussianMarginals::from_covariance(sigma);
}

}  // namespace

MomentTerms edgeworth_moment_terms(double t, const EdgeworthInputs& inputs, const GaussianMarginals& marg,
                                   EdgeworthKind kind) {
  return run_dp(t, inputs, marg, kind);
}

QValue q_correction_diag_with_derivative(double t, int k, const EdgeworthInputs& inputs,
                                         const GaussianMarginals& marg) {
  inputs.validate(marg.d(), k);
  return assemble_q(k, run_dp(t, inputs, marg, EdgeworthKind::Data), inputs.k0);
}

QValue q_hat_correction_diag_with_derivative(double t, int k, const EdgeworthInputs& inputs,
                                             const GaussianMarginals& marg) {
  inputs.validate(marg.d(), k);
  return assemble_q(k, run_dp(t, inputs, marg, EdgeworthKind::Bootstrap), inputs.k0);
}

double q_correction_diag(double t, int k, const EdgeworthInputs& inputs, const GaussianMarginals& marg) {
  return q_correction_diag_with_derivative(t, k, inputs, marg).value;
}

double q_hat_correction_diag(double t, int k, const EdgeworthInputs& inputs, const GaussianMarginals& marg) {
  return q_hat_correction_diag_with_derivative(t, k, inputs, marg).value;
}

double q_correction_diag(double t, int k, const EdgeworthInputs& inputs, const Matrix& sigma) {
  return q_correction_diag(t, k, inputs, diagonal_marginals(sigma));
}

double q_hat_correction_diag(double t, int k, const EdgeworthInputs& inputs, const Matrix& sigma) {
  return q_hat_correction_diag(t, k, inputs, diagonal_marginals(sigma));
}

MomentOracle m_ns_mc_oracle(double t, int s, const EdgeworthInputs& inputs, const Matrix& sigma, int reps,
                            const RngStream& rng, EdgeworthKind kind, int subset_budget) {
  const auto d = static_cast<int>(sigma.rows());
  if (sigma.cols() != d) fail(ErrorCode::DomainError, "m_ns_mc_oracle: covariance must be square");
  if (s < 1 || s > d) fail(ErrorCode::DomainError, "m_ns_mc_oracle: need 1 <= s <= d");
  if (reps < 2) fail(ErrorCode::DomainError, "m_ns_mc_oracle: reps must be at least 2");
  if (subset_budget < 1) fail(ErrorCode::DomainError, "m_ns_mc_oracle: subset_budget must be positive");
  inputs.validate(d, 1);

  const double skew_scale = 1.0 / (6.0 * std::sqrt(static_cast<double>(inputs.n)));
  const double gamma = kind == EdgeworthKind::Data ? 1.0 : inputs.gamma;
  const double total_subsets = binomial(d, s);

  std::vector<std::vector<int>> subsets;
  MomentOracle out;
  if (total_subsets <= subset_budget) {
    out.enumerated = true;
    std::vector<int> idx(static_cast<std::size_t>(s));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      subsets.push_back(idx);
      int pos = s - 1;
      while (pos >= 0 && idx[pos] == d - s + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int q = pos + 1; q < s; ++q) idx[q] = idx[q - 1] + 1;
    }
  } else {
    RngStream pick = rng.substream(static_cast<std::uint64_t>(StreamRole::Subset) << 40);
    std::vector<int> pool(static_cast<std::size_t>(d));
    std::iota(pool.begin(), pool.end(), 0);
    for (int draw = 0; draw < subset_budget; ++draw) {
      for (int j = 0; j < s; ++j) {
        const int chosen = j + static_cast<int>(pick.uniform_index(static_cast<std::uint64_t>(d - j)));
        std::swap(pool[j], pool[chosen]);
      }
      std::vector<int> idx(pool.begin(), pool.begin() + s);
      std::sort(idx.begin(), idx.end());
      subsets.push_back(std::move(idx));
    }
  }
  out.subsets_used = static_cast<long>(subsets.size());

  std::vector<double> est_n, est_z, est_diff;
  double var_n = 0.0;
  double var_diff = 0.0;
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(s, t);
  Eigen::VectorXd eps(s);
  for (std::size_t g = 0; g < subsets.size(); ++g) {
    const auto& idx = subsets[g];
    Matrix sub(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) sub(a, b) = sigma(idx[a], idx[b]);
    Eigen::LLT<Matrix> llt(sub);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::NonPositiveDefinite, "m_ns_mc_oracle: covariance block not positive definite");
    const Matrix lower = llt.matrixL();
    const Matrix prec = llt.solve(Matrix::Identity(s, s));
    const Eigen::VectorXd prec_mu = prec * mu;
    const double half_quad = 0.5 * mu.dot(prec_mu);

    RngStream stream = rng.substream(g);
    double sum_n = 0.0, sum_n2 = 0.0, sum_z = 0.0, sum_diff = 0.0, sum_diff2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      for (int a = 0; a < s; ++a) eps(a) = stream.normal();
      const Eigen::VectorXd u = mu + lower * eps;
      double weight = 0.0;
      double corr = 0.0;
      if ((u.array() > t).all()) {
        weight = std::exp(-prec_mu.dot(u) + half_quad);
        const Eigen::VectorXd y = prec * u;
        for (int a = 0; a < s; ++a) {
          const int j = idx[a];
          const double third = -y(a) * y(a) * y(a) + 3.0 * y(a) * prec(a, a);
          corr -= gamma * skew_scale * inputs.third_cumulants[j] * third;
          if (kind == EdgeworthKind::Bootstrap && !inputs.var_devs.empty())
            corr += 0.5 * inputs.var_devs[j] * (y(a) * y(a) - prec(a, a));
        }
      }
      const double vn = weight * (1.0 + corr);
      const double vd = weight * corr;
      sum_n += vn;
      sum_n2 += vn * vn;
      sum_z += weight;
      sum_diff += vd;
      sum_diff2 += vd * vd;
    }
    const double mean_n = sum_n / reps;
    const double mean_diff = sum_diff / reps;
    est_n.push_back(mean_n);
    est_z.push_back(sum_z / reps);
    est_diff.push_back(mean_diff);
    var_n += (sum_n2 / reps - mean_n * mean_n) / (reps - 1);
    var_diff += (sum_diff2 / reps - mean_diff * mean_diff) / (reps - 1);
  }

  auto total = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  if (out.enumerated) {
    out.m_n = total(est_n);
    out.m_z = total(est_z);
    out.diff = total(est_diff);
    out.se_m_n = std::sqrt(std::max(var_n, 0.0));
    out.se_diff = std::sqrt(std::max(var_diff, 0.0));
  } else {
    // subset sampling: the spread across sampled subsets carries both noise sources
    const double count = static_cast<double>(subsets.size());
    const double scale = total_subsets / count;
    out.m_n = scale * total(est_n);
    out.m_z = scale * total(est_z);
    out.diff = scale * total(est_diff);
    auto spread = [&](const std::vector<double>& v) {
      const double mean = total(v) / count;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return count > 1 ? total_subsets * std::sqrt(ss / (count - 1) / count) : 0.0;
    };
    out.se_m_n = spread(est_n);
    out.se_diff = spread(est_diff);
  }
  return out;
}

CFExpansion cornish_fisher_predict(double alpha, int k, int d, double sigma, const EdgeworthInputs& inputs,
                                   double eps) {
  if (!(eps > 0.0 && eps < 0.5)) fail(ErrorCode::DomainError, "cornish_fisher_predict: eps must lie in (0, 1/2)");
  if (!(alpha > eps && alpha < 1.0 - eps))
    fail(ErrorCode::WindowError, "cornish_fisher_predict: alpha outside (eps, 1 - eps)");
  const GaussianMarginals marg = GaussianMarginals::equal(d, sigma);
  inputs.validate(d, k);

  CFExpansion cf;
  cf.c_gauss = gk_inverse_independent(1.0 - alpha, d, k, sigma);
  const QValue q = q_hat_correction_diag_with_derivative(cf.c_gauss, k, inputs, marg);
  cf.q_hat = q.value;
  cf.q_hat_prime = q.derivative;
  cf.fk = fk_independent(cf.c_gauss, d, k, sigma);
  cf.fk_prime = fk_prime_independent(cf.c_gauss, d, k, sigma);
  cf.linear_term = -cf.q_hat / cf.fk;
  // second step of solving G_k(c + delta) + Q_hat(c + delta) = 1 - alpha for delta
  cf.quadratic_term = cf.q_hat_prime / (cf.fk * cf.fk) * cf.q_hat -
                      cf.fk_prime / (2.0 * cf.fk * cf.fk * cf.fk) * cf.q_hat * cf.q_hat;
  cf.predicted = cf.c_gauss + cf.linear_term + cf.quadratic_term;
  return cf;
}

}  // namespace kboot
