#include "kboot/array_conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kboot/error.hpp"

namespace kboot {

GershgorinInterval gershgorin_interval(const Matrix& a) {
  GershgorinInterval out{std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
  for (Eigen::Index j = 0; j < a.rows(); ++j) {
    const double radius = a.row(j).cwiseAbs().sum() - std::abs(a(j, j));
    out.lower = std::min(out.lower, a(j, j) - radius);
    out.upper = std::max(out.upper, a(j, j) + radius);
  }
  return out;
}

double ArrayConditionReport::min_eigenvalue() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& [size, value] : min_eig_by_size) out = std::min(out, value);
  return out;
}

ArrayConditionReport validate_array_conditions(const Matrix& array, const Matrix& sigma,
                                               const ArrayConditionOptions& options,
                                               const RngStream& rng) {
  const auto n = array.rows();
  const auto d = array.cols();
  if (n < 1 || d < 1) fail(ErrorCode::EmptyInput, "validate_array_conditions: empty array");
  if (sigma.rows() != d || sigma.cols() != d)
    fail(ErrorCode::DomainError, "validate_array_conditions: Sigma must be d x d");
  if (options.k0 < 1) fail(ErrorCode::DomainError, "validate_array_conditions: k0 must be positive");

  ArrayConditionReport report;
  report.max_sup_norm = array.cwiseAbs().maxCoeff();
  report.sup_norm_pass = report.max_sup_norm <= options.sup_norm_bound;

  const Matrix gram = (array.transpose() * array) / static_cast<double>(n);

  // Every entry (j, l) lies in some I with |I| <= k0 once k0 >= 2, so the
  // max-norm deviation over all such I is the entrywise maximum.
  const Matrix dev = gram - sigma;
  report.max_cov_dev = options.k0 >= 2 ? dev.cwiseAbs().maxCoeff() : dev.diagonal().cwiseAbs().maxCoeff();
  report.cov_dev_pass = report.max_cov_dev <= options.cov_dev_bound;

  const int max_size = static_cast<int>(std::min<Eigen::Index>(options.k0, d));
  const double threshold = 0.5 * options.sigma_star * options.sigma_star;
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(d));
  std::iota(pool.begin(), pool.end(), 0);
  RngStream subset_rng = rng.substream(static_cast<std::uint64_t>(StreamRole::Subset));

  auto check = [&](const std::vector<Eigen::Index>& idx, int size) {
    const Matrix sub = gram(idx, idx);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sub, Eigen::EigenvaluesOnly);
    const double lmin = solver.eigenvalues()(0);
    const double glow = gershgorin_interval(sub).lower;
    auto [it, inserted] = report.min_eig_by_size.try_emplace(size, lmin);
    if (!inserted) it->second = std::min(it->second, lmin);
    auto [git, ginserted] = report.gershgorin_by_size.try_emplace(size, glow);
    if (!ginserted) git->second = std::min(git->second, glow);
    ++report.subsets_checked;
  };

  for (int size = 1; size <= max_size; ++size) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(size));
    for (Eigen::Index start = 0; start + size <= d; ++start) {
      std::iota(idx.begin(), idx.end(), start);
      check(idx, size);
    }
    if (size < d) {
      for (int draw = 0; draw < options.subset_budget; ++draw) {
        // partial Fisher-Yates
        for (int j = 0; j < size; ++j) {
          const auto pick = j + static_cast<Eigen::Index>(
                                    subset_rng.uniform_index(static_cast<std::uint64_t>(d - j)));
          std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
        }
        std::copy(pool.begin(), pool.begin() + size, idx.begin());
        std::sort(idx.begin(), idx.end());
        check(idx, size);
      }
    }
  }
  report.eigen_pass = report.min_eigenvalue() >= threshold;
  return report;
}

}  // namespace kboot
