#ifndef KBOOT_KBOOT_H
#define KBOOT_KBOOT_H

/* C interface to the kboot library. Every handle is opaque and owned by the
   caller once returned; free it with the matching *_free function. Functions
   returning kboot_status leave a message for kboot_last_error() on failure.
   Strings returned through char** are released with kboot_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KBOOT_API __declspec(dllexport)
#else
#define KBOOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kboot_status {
  KBOOT_OK = 0,
  KBOOT_ERR_INVALID_ARGUMENT = 1,
  KBOOT_ERR_CONFIG = 2,
  KBOOT_ERR_DOMAIN = 3,
  KBOOT_ERR_IO = 4,
  KBOOT_ERR_RUNTIME = 5
} kboot_status;

typedef struct kboot_config kboot_config;
typedef struct kboot_table kboot_table;
typedef struct kboot_report kboot_report;

typedef void (*kboot_progress_fn)(long done, long total, void* user);

typedef struct kboot_run_options {
  const char* checkpoint_path; /* NULL disables checkpointing */
  int record_timing;           /* 0 writes runtime_s = 0 for byte-stable output */
  kboot_progress_fn progress;  /* may be NULL */
  void* progress_user;
} kboot_run_options;

typedef struct kboot_size_row {
  char design[4];
  char data_case[16];
  int n;
  double rho;
  char method[4];
  int k;
  double alpha;
  int reps;
  double rate;
  double se;
  double runtime_s;
} kboot_size_row;

KBOOT_API const char* kboot_version(void);
/* Message of the most recent failure on the calling thread. */
KBOOT_API const char* kboot_last_error(void);
KBOOT_API void kboot_string_free(char* s);

KBOOT_API kboot_status kboot_config_new_preset(const char* name, kboot_config** out);
KBOOT_API kboot_status kboot_config_from_json(const char* json_text, kboot_config** out);
KBOOT_API kboot_status kboot_config_from_file(const char* path, kboot_config** out);
/* CLI-style override: key "rho", value "0.2,0.8". */
KBOOT_API kboot_status kboot_config_set(kboot_config* config, const char* key, const char* value);
KBOOT_API kboot_status kboot_config_validate(const kboot_config* config);
KBOOT_API kboot_status kboot_config_to_json(const kboot_config* config, char** out);
KBOOT_API void kboot_config_free(kboot_config* config);

KBOOT_API void kboot_run_options_init(kboot_run_options* options);
KBOOT_API kboot_status kboot_run(const kboot_config* config, const kboot_run_options* options,
                                 kboot_table** out);
KBOOT_API size_t kboot_table_rows(const kboot_table* table);
KBOOT_API kboot_status kboot_table_row(const kboot_table* table, size_t index, kboot_size_row* out);
/* format: "csv", "markdown" or "json" */
KBOOT_API kboot_status kboot_table_render(const kboot_table* table, const char* format, char** out);
KBOOT_API kboot_status kboot_table_write(const kboot_table* table, const char* format, const char* path);
KBOOT_API void kboot_table_free(kboot_table* table);

KBOOT_API kboot_status kboot_diagnose(const kboot_config* config, kboot_report** out);
KBOOT_API kboot_status kboot_report_render(const kboot_report* report, const char* format, char** out);
KBOOT_API kboot_status kboot_report_write(const kboot_report* report, const char* format, const char* path);
KBOOT_API void kboot_report_free(kboot_report* report);

/* Numeric primitives. */
KBOOT_API kboot_status kboot_kth_order_stat(const double* values, size_t d, int k, double* out);
KBOOT_API kboot_status kboot_hk(int k, double lambda, double* out);
KBOOT_API kboot_status kboot_solve_lambda_eps(int k, double eps, double* out);
KBOOT_API kboot_status kboot_gamma_quantile(double p, double theta, double* out);

#ifdef __cplusplus
}
#endif

#endif
