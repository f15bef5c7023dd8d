#include "kboot/kboot.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "kboot/error.hpp"
#include "kboot/harness.hpp"
#include "kboot/poisson.hpp"
#include "kboot/special.hpp"
#include "kboot/stats_core.hpp"

struct kboot_config {
  kboot::ExperimentConfig config;
};

struct kboot_table {
  kboot::SizeTable table;
};

struct kboot_report {
  kboot::DiagnosticReport report;
};

namespace {

thread_local std::string last_error;

kboot_status map_code(kboot::ErrorCode code) {
  switch (code) {
    case kboot::ErrorCode::ConfigError: return KBOOT_ERR_CONFIG;
    case kboot::ErrorCode::IOError: return KBOOT_ERR_IO;
    default: return KBOOT_ERR_DOMAIN;
  }
}

template <class F>
kboot_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return KBOOT_OK;
  } catch (const kboot::Error& e) {
    last_error = std::string(kboot::to_string(e.code())) + ": " + e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return KBOOT_ERR_RUNTIME;
  } catch (...) {
    last_error = "unknown failure";
    return KBOOT_ERR_RUNTIME;
  }
}

kboot_status invalid(const char* what) {
  last_error = what;
  return KBOOT_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_field(char* dst, std::size_t cap, const std::string& src) {
  std::strncpy(dst, src.c_str(), cap - 1);
  dst[cap - 1] = '\0';
}

}  // namespace

extern "C" {

const char* kboot_version(void) { return "1.0.0"; }

const char* kboot_last_error(void) { return last_error.c_str(); }

void kboot_string_free(char* s) { std::free(s); }

kboot_status kboot_config_new_preset(const char* name, kboot_config** out) {
  if (!name || !out) return invalid("kboot_config_new_preset: null argument");
  return guarded([&] { *out = new kboot_config{kboot::preset(name)}; });
}

kboot_status kboot_config_from_json(const char* json_text, kboot_config** out) {
  if (!json_text || !out) return invalid("kboot_config_from_json: null argument");
  return guarded([&] { *out = new kboot_config{kboot::config_from_json(json_text)}; });
}

kboot_status kboot_config_from_file(const char* path, kboot_config** out) {
  if (!path || !out) return invalid("kboot_config_from_file: null argument");
  return guarded([&] { *out = new kboot_config{kboot::config_from_file(path)}; });
}

kboot_status kboot_config_set(kboot_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return invalid("kboot_config_set: null argument");
  return guarded([&] { kboot::apply_override(config->config, key, value); });
}

kboot_status kboot_config_validate(const kboot_config* config) {
  if (!config) return invalid("kboot_config_validate: null config");
  return guarded([&] { config->config.validate(); });
}

kboot_status kboot_config_to_json(const kboot_config* config, char** out) {
  if (!config || !out) return invalid("kboot_config_to_json: null argument");
  return guarded([&] { *out = copy_string(kboot::config_to_json(config->config)); });
}

void kboot_config_free(kboot_config* config) { delete config; }

void kboot_run_options_init(kboot_run_options* options) {
  if (!options) return;
  options->checkpoint_path = nullptr;
  options->record_timing = 1;
  options->progress = nullptr;
  options->progress_user = nullptr;
}

kboot_status kboot_run(const kboot_config* config, const kboot_run_options* options, kboot_table** out) {
  if (!config || !out) return invalid("kboot_run: null argument");
  return guarded([&] {
    kboot::RunOptions opts;
    if (options) {
      if (options->checkpoint_path) opts.checkpoint_path = options->checkpoint_path;
      opts.record_timing = options->record_timing != 0;
      if (options->progress) {
        const kboot_progress_fn fn = options->progress;
        void* user = options->progress_user;
        opts.progress = [fn, user](long done, long total) { fn(done, total, user); };
      }
    }
    *out = new kboot_table{kboot::run_experiment(config->config, opts)};
  });
}

size_t kboot_table_rows(const kboot_table* table) { return table ? table->table.rows.size() : 0; }

kboot_status kboot_table_row(const kboot_table* table, size_t index, kboot_size_row* out) {
  if (!table || !out) return invalid("kboot_table_row: null argument");
  if (index >= table->table.rows.size()) return invalid("kboot_table_row: index out of range");
  const kboot::SizeRow& r = table->table.rows[index];
  copy_field(out->design, sizeof out->design, kboot::to_string(r.design));
  copy_field(out->data_case, sizeof out->data_case, kboot::to_string(r.data_case));
  copy_field(out->method, sizeof out->method, kboot::to_string(r.method));
  out->n = r.n;
  out->rho = r.rho;
  out->k = r.k;
  out->alpha = r.alpha;
  out->reps = r.reps;
  out->rate = r.rate;
  out->se = r.se;
  out->runtime_s = r.runtime_s;
  return KBOOT_OK;
}

kboot_status kboot_table_render(const kboot_table* table, const char* format, char** out) {
  if (!table || !format || !out) return invalid("kboot_table_render: null argument");
  return guarded([&] { *out = copy_string(kboot::render_table(table->table, kboot::parse_format(format))); });
}

kboot_status kboot_table_write(const kboot_table* table, const char* format, const char* path) {
  if (!table || !format || !path) return invalid("kboot_table_write: null argument");
  return guarded([&] {
    kboot::write_text_file(path, kboot::render_table(table->table, kboot::parse_format(format)));
  });
}

void kboot_table_free(kboot_table* table) { delete table; }

kboot_status kboot_diagnose(const kboot_config* config, kboot_report** out) {
  if (!config || !out) return invalid("kboot_diagnose: null argument");
  return guarded([&] { *out = new kboot_report{kboot::run_diagnostics(config->config)}; });
}

kboot_status kboot_report_render(const kboot_report* report, const char* format, char** out) {
  if (!report || !format || !out) return invalid("kboot_report_render: null argument");
  return guarded([&] { *out = copy_string(kboot::render_report(report->report, kboot::parse_format(format))); });
}

kboot_status kboot_report_write(const kboot_report* report, const char* format, const char* path) {
  if (!report || !format || !path) return invalid("kboot_report_write: null argument");
  return guarded([&] {
    kboot::write_text_file(path, kboot::render_report(report->report, kboot::parse_format(format)));
  });
}

void kboot_report_free(kboot_report* report) { delete report; }

kboot_status kboot_kth_order_stat(const double* values, size_t d, int k, double* out) {
  if (!values || !out) return invalid("kboot_kth_order_stat: null argument");
  return guarded([&] { *out = kboot::kth_order_stat(std::span<const double>(values, d), k); });
}

kboot_status kboot_hk(int k, double lambda, double* out) {
  if (!out) return invalid("kboot_hk: null argument");
  return guarded([&] { *out = kboot::hk(k, lambda); });
}

kboot_status kboot_solve_lambda_eps(int k, double eps, double* out) {
  if (!out) return invalid("kboot_solve_lambda_eps: null argument");
  return guarded([&] { *out = kboot::solve_lambda_eps(k, eps); });
}

kboot_status kboot_gamma_quantile(double p, double theta, double* out) {
  if (!out) return invalid("kboot_gamma_quantile: null argument");
  return guarded([&] { *out = kboot::gamma_quantile(p, theta); });
}

}  // extern "C"
