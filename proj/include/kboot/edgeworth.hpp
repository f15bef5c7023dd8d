#pragma once

#include <vector>

#include "kboot/gaussian_reference.hpp"
#include "kboot/rng.hpp"
#include "kboot/sampling.hpp"

namespace kboot {

// Per-coordinate inputs of the first-order Edgeworth corrections under a
// diagonal covariance. third_cumulants[j] is the (j,j,j) entry of the third
// moment tensor, var_devs[j] the (j,j) entry of b2_bar - Sigma.
struct EdgeworthInputs {
  std::vector<double> third_cumulants;
  std::vector<double> var_devs;
  double gamma = 0.0;
  int n = 1;
  int k0 = 2;

  void validate(int d, int k) const;
};

// Bootstrap-side inputs from a sample: var_devs[j] = mean_i b_ij^2 - sigma_diag[j],
// third_cumulants[j] = mean_i b_ij^3 with b_i = X_i - X_bar.
EdgeworthInputs sample_edgeworth_inputs(const Matrix& x, const std::vector<double>& sigma_diag, double gamma, int k0);

// k0 = ceil(A log(1 / eps_n)), capped at 40.
int default_k0(double eps_n, double A = 4.0);

enum class EdgeworthKind { Data, Bootstrap };

struct QValue {
  double value = 0.0;
  double derivative = 0.0;
};

// m_z[s] = M_{Z,s}(t), diff[s] = M_{n,s}(t) - M_{Z,s}(t) for s = 0..k0.
struct MomentTerms {
  std::vector<double> m_z;
  std::vector<double> diff;
  std::vector<double> m_z_prime;
  std::vector<double> diff_prime;
};

MomentTerms edgeworth_moment_terms(double t, const EdgeworthInputs& inputs, const GaussianMarginals& marg,
                                   EdgeworthKind kind);

QValue q_correction_diag_with_derivative(double t, int k, const EdgeworthInputs& inputs,
                                         const GaussianMarginals& marg);
QValue q_hat_correction_diag_with_derivative(double t, int k, const EdgeworthInputs& inputs,
                                             const GaussianMarginals& marg);
double q_correction_diag(double t, int k, const EdgeworthInputs& inputs, const GaussianMarginals& marg);
double q_hat_correction_diag(double t, int k, const EdgeworthInputs& inputs, const GaussianMarginals& marg);

// Covariance-matrix entry points; NotDiagonal unless sigma is diagonal.
double q_correction_diag(double t, int k, const EdgeworthInputs& inputs, const Matrix& sigma);
double q_hat_correction_diag(double t, int k, const EdgeworthInputs& inputs, const Matrix& sigma);

struct MomentOracle {
  double m_n = 0.0;
  double m_z = 0.0;
  double diff = 0.0;
  double se_m_n = 0.0;
  double se_diff = 0.0;
  long subsets_used = 0;
  bool enumerated = false;
};

// Importance-sampling estimate of M_{n,s}(t) for a general covariance with
// diagonal correction tensors. Proposal N(t 1, Sigma_II). All subsets are
// enumerated when there are at most subset_budget of them, otherwise
// subset_budget subsets are drawn uniformly.
MomentOracle m_ns_mc_oracle(double t, int s, const EdgeworthInputs& inputs, const Matrix& sigma, int reps,
                            const RngStream& rng, EdgeworthKind kind = EdgeworthKind::Data,
                            int subset_budget = 256);

struct CFExpansion {
  double c_gauss = 0.0;
  double linear_term = 0.0;
  double quadratic_term = 0.0;
  double predicted = 0.0;
  double q_hat = 0.0;
  double q_hat_prime = 0.0;
  double fk = 0.0;
  double fk_prime = 0.0;
};

// Independent equal-variance coordinates; WindowError unless eps < alpha < 1 - eps.
CFExpansion cornish_fisher_predict(double alpha, int k, int d, double sigma, const EdgeworthInputs& inputs,
                                   double eps = 0.05);

}  // namespace kboot
