#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kboot/multipliers.hpp"
#include "kboot/sampling.hpp"

namespace kboot {

enum class Design { I, II };
enum class Method { EB, GB, MB, RB, BB, DB };

std::string to_string(Design design);
std::string to_string(DataCase data_case);
std::string to_string(Method method);
Design parse_design(const std::string& text);
DataCase parse_case(const std::string& text);
Method parse_method(const std::string& text);
MultiplierLaw parse_law(const std::string& text, double beta_nu);

// Design I is equicorrelated, Design II is AR(1).
CorrelationSpec correlation_for(Design design, double rho, int d);

struct DiagnosticSettings {
  int reps = 2000;
  double eps = 0.1;
  int k0 = 10;
  double bound_constant = 1.0;
};

// One experiment is the cross product of the sweep lists; every other field
// is shared by all cells.
struct ExperimentConfig {
  std::vector<Design> designs{Design::I};
  std::vector<double> rhos{0.2};
  std::vector<int> ns{200};
  int d = 400;
  std::vector<int> ks{2};
  std::vector<DataCase> cases{DataCase::Asymmetric};
  double theta_asymmetric = 1.0;
  double theta_symmetric = 0.5;
  std::vector<Method> methods{Method::GB, Method::MB, Method::RB, Method::BB};
  double alpha = 0.1;
  int B1 = 499;
  int B2 = 99;
  int reps = 1000;
  std::uint64_t seed = 20240917;
  int threads = 0;  // 0 = hardware concurrency
  // Replace the copula draw by exact N(0, R) rows.
  bool gaussian_data = false;
  std::string db_outer = "gaussian";
  std::string db_inner = "beta";
  double beta_nu = 0.1;
  DiagnosticSettings diagnostics;

  // ConfigError naming the offending field.
  void validate() const;
};

ExperimentConfig preset(const std::string& name);  // "desk" or "paper"
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig config_from_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);
// CLI-style override, e.g. ("rho", "0.2,0.8") or ("methods", "GB,MB").
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

struct SizeRow {
  Design design = Design::I;
  DataCase data_case = DataCase::Asymmetric;
  int n = 0;
  double rho = 0.0;
  Method method = Method::GB;
  int k = 1;
  double alpha = 0.1;
  int reps = 0;
  double rate = 0.0;
  double se = 0.0;
  double runtime_s = 0.0;
};

struct SizeTable {
  std::vector<SizeRow> rows;
  std::vector<Method> method_order;
};

struct RunOptions {
  std::string checkpoint_path;  // empty disables checkpointing
  bool record_timing = true;
  int checkpoint_every = 50;    // completed replications between checkpoint writes
  std::function<void(long done, long total)> progress;
};

SizeTable run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

enum class TableFormat { Csv, Markdown, Json };
TableFormat parse_format(const std::string& text);

std::string render_table(const SizeTable& table, TableFormat format);
SizeTable parse_table_csv(const std::string& text);
void write_text_file(const std::string& path, const std::string& text);

struct DiagnosticRow {
  std::string diagnostic;
  std::string label;
  std::vector<std::pair<std::string, double>> fields;

  double field(const std::string& name) const;
};

struct DiagnosticReport {
  std::vector<DiagnosticRow> rows;
};

DiagnosticReport run_diagnostics(const ExperimentConfig& config);
std::string render_report(const DiagnosticReport& report, TableFormat format);

}  // namespace kboot
