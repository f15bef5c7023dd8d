#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "kboot/bootstrap.hpp"
#include "kboot/edgeworth.hpp"
#include "kboot/error.hpp"
#include "kboot/gaussian_reference.hpp"
#include "kboot/harness.hpp"
#include "kboot/mixing.hpp"
#include "kboot/poisson.hpp"
#include "kboot/special.hpp"

namespace kboot {

double DiagnosticRow::field(const std::string& name) const {
  for (const auto& [key, value] : fields)
    if (key == name) return value;
  fail(ErrorCode::DomainError, "diagnostic row '" + diagnostic + "' has no field '" + name + "'");
}

namespace {

RngStream diagnostic_stream(const ExperimentConfig& config, std::uint64_t tag) {
  return RngStream(derive_key({config.seed, static_cast<std::uint64_t>(StreamRole::Oracle), tag}));
}

// threshold with d Phi_bar(t) = lambda
double threshold_for_lambda(double lambda, int d, double sigma) {
  return -sigma * normal_quantile(lambda / static_cast<double>(d));
}

void poisson_gap_rows(const ExperimentConfig& c, DiagnosticReport& report) {
  const int d = c.d;
  const int k = c.ks.front();
  const double rho = c.rhos.front();
  const Matrix r = build_correlation(correlation_for(c.designs.front(), rho, d));
  const GaussianMarginals marg = GaussianMarginals::equal(d, 1.0);
  const double t = threshold_for_lambda(2.0, d, 1.0);
  const PoissonGap gap = poisson_gap(t, marg, k, r, c.diagnostics.reps, diagnostic_stream(c, 1),
                                     c.diagnostics.bound_constant);
  report.rows.push_back({"poisson_gap",
                         fmt::format("design={} rho={} d={} k={}", to_string(c.designs.front()), rho, d, k),
                         {{"t", t},
                          {"lambda", gap.lambda},
                          {"gap", gap.gap},
                          {"gap_se", gap.gap_se},
                          {"binomial_poisson_gap", binomial_poisson_gap(d, 2.0 / d, k)},
                          {"bound", gap.bound},
                          {"exceeds_bound", gap.exceeds_bound ? 1.0 : 0.0}}});
}

void cornish_fisher_rows(const ExperimentConfig& c, DiagnosticReport& report) {
  const int d = c.d;
  const int k = c.ks.front();
  const int n = c.ns.front();
  RngStream data_rng = diagnostic_stream(c, 2);
  const CholeskyFactor identity{Matrix::Identity(d, d)};
  const Matrix x = sample_latent_gaussian(n, identity, data_rng);
  const MultiplierLaw law = MultiplierLaw::mammen();
  const int k0 = std::max(c.diagnostics.k0, k);
  const EdgeworthInputs inputs = sample_edgeworth_inputs(x, std::vector<double>(d, 1.0), law.gamma(), k0);
  // the expansion needs alpha strictly inside the window
  const double window_eps = std::min(c.diagnostics.eps, std::min(c.alpha, 1.0 - c.alpha)) / 2.0;
  const CFExpansion cf = cornish_fisher_predict(c.alpha, k, d, 1.0, inputs, window_eps);
  const int B = std::max(c.B1, 2000);
  const BootstrapDraws draws = wild_bootstrap_draws(x, law, B, k, diagnostic_stream(c, 3));
  report.rows.push_back({"cornish_fisher",
                         fmt::format("gaussian d={} n={} k={} B={} law={}", d, n, k, B, law.name()),
                         {{"c_gauss", cf.c_gauss},
                          {"linear", cf.linear_term},
                          {"quadratic", cf.quadratic_term},
                          {"predicted", cf.predicted},
                          {"observed", critical_value(draws, 1.0 - c.alpha)}}});
}

void remainder_rows(const ExperimentConfig& c, DiagnosticReport& report) {
  const double rho = c.rhos.front();
  const MixingParams params =
      MixingParams::ar1(rho, 1.0, c.d, c.ns.front(), std::max(c.diagnostics.k0, c.ks.front()), c.ks.front(),
                        c.diagnostics.eps);
  const BlockLayout layout = block_layout(params);
  const RemainderBreakdown rd = remainder_components(params, layout);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.rows.push_back({"remainder_rd",
                         fmt::format("ar1 rho={} d={} n={} k0={}", rho, c.d, c.ns.front(), params.k0),
                         {{"m_d", static_cast<double>(layout.m_d)},
                          {"ell_d", static_cast<double>(layout.ell_d)},
                          {"q_d", static_cast<double>(layout.q_d)},
                          {"s_d", static_cast<double>(layout.s_d)},
                          {"degenerate", layout.degenerate ? 1.0 : 0.0},
                          {"eta1", rd.eta1},
                          {"inv_qd", rd.degenerate ? nan : rd.inv_qd},
                          {"mixing_term", rd.mixing_term},
                          {"log10_mixing_term", rd.log10_mixing_term},
                          {"poisson_tail", rd.poisson_tail},
                          {"r_d", rd.r_d}}});
}

void block_rows(const ExperimentConfig& c, DiagnosticReport& report) {
  const double rho = c.rhos.front();
  const int d = c.d;
  const MixingParams params =
      MixingParams::ar1(rho, 1.0, d, c.ns.front(), std::max(c.diagnostics.k0, c.ks.front()), c.ks.front(),
                        c.diagnostics.eps);
  BlockLayout layout = block_layout(params);
  bool fallback = false;
  if (layout.degenerate) {
    // theory lengths exceed d; keep m_d and use a gap long enough that rho^ell <= 1/d
    fallback = true;
    const double ell = std::isinf(params.a_alpha) ? 1.0 : std::ceil(std::log(static_cast<double>(d)) / params.a_alpha);
    layout = explicit_layout(d, std::max<std::int64_t>(2, layout.m_d), std::max<std::int64_t>(1, static_cast<std::int64_t>(ell)));
  }
  const double t = threshold_for_lambda(2.0, d, 1.0);
  const double theta_star = params.dependence().theta_star;
  const RngStream root = diagnostic_stream(c, 4);
  long mismatches = 0;
  const int paths = c.diagnostics.reps;
  for (int p = 0; p < paths; ++p) {
    RngStream stream = root.substream(static_cast<std::uint64_t>(p));
    const std::vector<double> path = sample_ar1_path(d, rho, 1.0, stream);
    if (block_exceedance_compare(path, layout, t).mismatch) ++mismatches;
  }
  const double rate = static_cast<double>(mismatches) / paths;
  report.rows.push_back({"block_exceedance",
                         fmt::format("ar1 rho={} d={} t={:.4f}", rho, d, t),
                         {{"fallback_layout", fallback ? 1.0 : 0.0},
                          {"m_d", static_cast<double>(layout.m_d)},
                          {"ell_d", static_cast<double>(layout.ell_d)},
                          {"q_d", static_cast<double>(layout.q_d)},
                          {"mismatch_rate", rate},
                          {"mismatch_se", std::sqrt(rate * (1.0 - rate) / paths)},
                          {"bound", layout.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                                      : bad_event_bound(layout, t, 1.0, theta_star)}}});
}

void window_rows(const ExperimentConfig& c, DiagnosticReport& report) {
  const double rho = c.rhos.front();
  const int k = c.ks.front();
  const PoissonWindowReport w =
      poisson_window_check(rho, 1.0, c.d, c.ns.front(), k, std::max(c.diagnostics.k0, k), c.diagnostics.eps,
                           c.diagnostics.reps, diagnostic_stream(c, 5), c.diagnostics.bound_constant, 5);
  for (const PoissonWindowRow& row : w.rows) {
    report.rows.push_back({"poisson_window",
                           fmt::format("ar1 rho={} d={} t={:.4f}", rho, c.d, row.t),
                           {{"lambda", row.lambda},
                            {"gk_hat", row.gk_hat},
                            {"gk_se", row.gk_se},
                            {"hk", row.hk},
                            {"gap", row.gap}}});
  }
  report.rows.push_back({"poisson_window",
                         fmt::format("ar1 rho={} d={} summary", rho, c.d),
                         {{"max_gap", w.max_gap}, {"bound", w.bound}, {"degenerate", w.degenerate ? 1.0 : 0.0}}});
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.6g}", v);
}

}  // namespace

DiagnosticReport run_diagnostics(const ExperimentConfig& config) {
  config.validate();
  for (double rho : config.rhos)
    if (!(std::abs(rho) < 1.0)) fail(ErrorCode::ConfigError, "config field 'rho': diagnostics need |rho| < 1");
  DiagnosticReport report;
  poisson_gap_rows(config, report);
  cornish_fisher_rows(config, report);
  remainder_rows(config, report);
  block_rows(config, report);
  window_rows(config, report);
  return report;
}

std::string render_report(const DiagnosticReport& report, TableFormat format) {
  std::string out;
  switch (format) {
    case TableFormat::Csv: {
      out = "diagnostic,label,field,value\n";
      for (const auto& row : report.rows)
        for (const auto& [key, value] : row.fields)
          out += fmt::format("{},{},{},{}\n", row.diagnostic, row.label, key, format_value(value));
      return out;
    }
    case TableFormat::Markdown: {
      std::vector<std::string> order;
      std::map<std::string, std::vector<const DiagnosticRow*>> groups;
      for (const auto& row : report.rows) {
        if (!groups.count(row.diagnostic)) order.push_back(row.diagnostic);
        groups[row.diagnostic].push_back(&row);
      }
      for (const auto& name : order) {
        const auto& rows = groups[name];
        out += fmt::format("## {}\n\n| label |", name);
        std::vector<std::string> columns;
        for (const auto* row : rows)
          for (const auto& [key, value] : row->fields)
            if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
        for (const auto& col : columns) out += fmt::format(" {} |", col);
        out += "\n|---|";
        for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
        out += "\n";
        for (const auto* row : rows) {
          out += fmt::format("| {} |", row->label);
          for (const auto& col : columns) {
            std::string cell = "-";
            for (const auto& [key, value] : row->fields)
              if (key == col) cell = format_value(value);
            out += fmt::format(" {} |", cell);
          }
          out += "\n";
        }
        out += "\n";
      }
      return out;
    }
    case TableFormat::Json: {
      nlohmann::json doc = nlohmann::json::array();
      for (const auto& row : report.rows) {
        nlohmann::json fields = nlohmann::json::object();
        for (const auto& [key, value] : row.fields) {
          if (std::isnan(value)) fields[key] = nullptr;
          else fields[key] = value;
        }
        doc.push_back({{"diagnostic", row.diagnostic}, {"label", row.label}, {"fields", fields}});
      }
      return doc.dump(2) + "\n";
    }
  }
  return out;
}

}  // namespace kboot
