#pragma once

#include <limits>
#include <map>

#include "kboot/rng.hpp"
#include "kboot/sampling.hpp"

namespace kboot {

struct GershgorinInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Every eigenvalue of the symmetric matrix lies in [lower, upper].
GershgorinInterval gershgorin_interval(const Matrix& a);

struct ArrayConditionOptions {
  int k0 = 2;
  double sigma_star = 1.0;
  // Random index sets checked per subset size, on top of the contiguous windows.
  int subset_budget = 64;
  // Thresholds L_n and r_n; infinite means the condition is reported only.
  double sup_norm_bound = std::numeric_limits<double>::infinity();
  double cov_dev_bound = std::numeric_limits<double>::infinity();
};

struct ArrayConditionReport {
  double max_sup_norm = 0.0;                // max_i ||a_i||_inf
  std::map<int, double> min_eig_by_size;    // s -> min over checked |I| = s of lambda_min
  std::map<int, double> gershgorin_by_size; // s -> min over checked |I| = s of the Gershgorin lower end
  double max_cov_dev = 0.0;                 // max over |I| <= k0 of ||Gram_II - Sigma_II||_max
  int subsets_checked = 0;
  bool sup_norm_pass = true;
  bool eigen_pass = true;
  bool cov_dev_pass = true;

  double min_eigenvalue() const;
  bool pass() const { return sup_norm_pass && eigen_pass && cov_dev_pass; }
};

// `array` is n x d with rows a_i. Gram = (1/n) sum_i a_i a_i^T.
ArrayConditionReport validate_array_conditions(const Matrix& array, const Matrix& sigma,
                                               const ArrayConditionOptions& options,
                                               const RngStream& rng);

}  // namespace kboot
