// kboot command line: runs size experiments and diagnostics through the C API.

#include <cstdio>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kboot/kboot.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(kboot_status status) {
  return status == KBOOT_ERR_CONFIG || status == KBOOT_ERR_INVALID_ARGUMENT ? kExitConfig : kExitRuntime;
}

int report_failure(const std::string& stage, kboot_status status) {
  std::fprintf(stderr, "kboot: %s failed: %s\n", stage.c_str(), kboot_last_error());
  return exit_code_for(status);
}

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::map<std::string, std::string> overrides;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment configuration");
  cmd->add_option("--preset", args.preset, "Start from a preset: desk or paper");
  for (const char* key : {"design", "rho", "n", "d", "k", "case", "methods", "alpha", "b1", "b2", "reps", "seed",
                          "threads", "db-outer", "db-inner", "beta-nu"}) {
    std::string field = key;
    for (char& c : field)
      if (c == '-') c = '_';
    cmd->add_option_function<std::string>(
        std::string("--") + key, [&args, field](const std::string& v) { args.overrides[field] = v; },
        "Override '" + field + "' (comma-separated lists allowed)");
  }
  cmd->add_option("--out", args.out, "Output file (default: stdout)");
  cmd->add_option("--format", args.format, "csv, markdown or json")->check(CLI::IsMember({"csv", "markdown", "md", "json"}));
}

int load_config(const CommonArgs& args, kboot_config** config) {
  if (!args.config_path.empty() && !args.preset.empty()) {
    std::fprintf(stderr, "kboot: --preset and --config are mutually exclusive\n");
    return kExitConfig;
  }
  kboot_status status = KBOOT_OK;
  if (!args.config_path.empty()) {
    status = kboot_config_from_file(args.config_path.c_str(), config);
  } else {
    status = kboot_config_new_preset(args.preset.empty() ? "desk" : args.preset.c_str(), config);
  }
  if (status != KBOOT_OK) return report_failure("loading configuration", status);
  for (const auto& [key, value] : args.overrides) {
    status = kboot_config_set(*config, key.c_str(), value.c_str());
    if (status != KBOOT_OK) return report_failure("override of '" + key + "'", status);
  }
  status = kboot_config_validate(*config);
  if (status != KBOOT_OK) return report_failure("validating configuration", status);
  return 0;
}

void note_db_laws(const kboot_config* config) {
  char* text = nullptr;
  if (kboot_config_to_json(config, &text) != KBOOT_OK) return;
  const auto doc = nlohmann::json::parse(text);
  kboot_string_free(text);
  for (const auto& m : doc["methods"]) {
    if (m == "DB") {
      std::fprintf(stderr,
                   "kboot: note: DB uses first-level law '%s' and second-level law '%s'; "
                   "this pairing is a documented default, not taken from a published design\n",
                   doc["db_outer"].get<std::string>().c_str(), doc["db_inner"].get<std::string>().c_str());
    }
  }
}

int emit(const std::string& out, char* text, kboot_status status) {
  if (status != KBOOT_OK) return report_failure("rendering output", status);
  if (out.empty()) {
    std::fputs(text, stdout);
  } else {
    std::FILE* f = std::fopen(out.c_str(), "w");
    if (!f) {
      std::fprintf(stderr, "kboot: cannot open '%s' for writing\n", out.c_str());
      kboot_string_free(text);
      return kExitRuntime;
    }
    std::fputs(text, f);
    std::fclose(f);
  }
  kboot_string_free(text);
  return 0;
}

void progress(long done, long total, void*) {
  if (done == total || done % 100 == 0) std::fprintf(stderr, "\rkboot: %ld / %ld replications", done, total);
  if (done == total) std::fprintf(stderr, "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap size experiments for the k-th largest coordinate of a normalized sum"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string checkpoint;
  bool no_timing = false;
  bool quiet = false;
  bool print_config = false;
  CLI::App* run = app.add_subcommand("run", "Run the empirical-size experiment");
  add_common(run, run_args);
  run->add_option("--checkpoint", checkpoint, "Checkpoint file; an existing one is resumed");
  run->add_flag("--no-timing", no_timing, "Write runtime_s = 0 so output bytes depend only on the configuration");
  run->add_flag("--quiet", quiet, "Suppress progress output");
  run->add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  CommonArgs diag_args;
  CLI::App* diagnose = app.add_subcommand("diagnose", "Run the reference-theory diagnostics");
  add_common(diagnose, diag_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  kboot_config* config = nullptr;
  if (run->parsed()) {
    if (const int rc = load_config(run_args, &config); rc != 0) {
      kboot_config_free(config);
      return rc;
    }
    if (print_config) {
      char* text = nullptr;
      const kboot_status st = kboot_config_to_json(config, &text);
      const int rc = emit("", text, st);
      std::fputs("\n", stdout);
      kboot_config_free(config);
      return rc;
    }
    note_db_laws(config);
    kboot_run_options options;
    kboot_run_options_init(&options);
    options.checkpoint_path = checkpoint.empty() ? nullptr : checkpoint.c_str();
    options.record_timing = no_timing ? 0 : 1;
    if (!quiet) options.progress = progress;
    kboot_table* table = nullptr;
    const kboot_status status = kboot_run(config, &options, &table);
    kboot_config_free(config);
    if (status != KBOOT_OK) return report_failure("experiment", status);
    char* text = nullptr;
    const kboot_status rendered = kboot_table_render(table, run_args.format.c_str(), &text);
    const int rc = emit(run_args.out, text, rendered);
    kboot_table_free(table);
    return rc;
  }

  if (const int rc = load_config(diag_args, &config); rc != 0) {
    kboot_config_free(config);
    return rc;
  }
  kboot_report* report = nullptr;
  const kboot_status status = kboot_diagnose(config, &report);
  kboot_config_free(config);
  if (status != KBOOT_OK) return report_failure("diagnostics", status);
  char* text = nullptr;
  const kboot_status rendered = kboot_report_render(report, diag_args.format.c_str(), &text);
  const int rc = emit(diag_args.out, text, rendered);
  kboot_report_free(report);
  return rc;
}
