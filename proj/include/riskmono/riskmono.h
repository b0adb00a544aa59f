#ifndef RISKMONO_RISKMONO_H
#define RISKMONO_RISKMONO_H

#include <stddef.h>
#include <stdint.h>

#if defined(RISKMONO_BUILDING)
#define RM_API __attribute__((visibility("default")))
#else
#define RM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rm_status {
  RM_OK = 0,
  RM_ERR_INVALID_ARGUMENT = 1,
  RM_ERR_INVALID_SPLIT = 2,
  RM_ERR_INVALID_SUBSAMPLE = 3,
  RM_ERR_INFEASIBLE_ETA = 4,
  RM_ERR_NUMERIC = 5,
  RM_ERR_DOMAIN = 6,
  RM_ERR_SOLVER = 7,
  RM_ERR_IO = 8,
  RM_ERR_INTERNAL = 9
} rm_status;

typedef struct rm_dataset rm_dataset;
typedef struct rm_result rm_result;
typedef struct rm_sweep_config rm_sweep_config;
typedef struct rm_curve rm_curve;
typedef struct rm_selftest_report rm_selftest_report;

/* Message of the most recent failure on the calling thread; never NULL. */
RM_API const char* rm_last_error(void);
RM_API const char* rm_status_string(rm_status status);
RM_API const char* rm_version(void);

/* Datasets. CSV files are headerless, response first. */
RM_API rm_status rm_dataset_read_csv(const char* path, rm_dataset** out);
/* x is row-major n by p. */
RM_API rm_status rm_dataset_from_arrays(const double* x, const double* y, size_t n, size_t p,
                                        rm_dataset** out);
RM_API size_t rm_dataset_rows(const rm_dataset* data);
RM_API size_t rm_dataset_cols(const rm_dataset* data);
RM_API void rm_dataset_free(rm_dataset* data);

/* Zero-step and one-step monotonization of a base procedure. */
typedef struct rm_monotonize_options {
  const char* procedure; /* "zero" or "one" */
  const char* base;      /* "mn2", "mn1", "ridge", "lasso", "null" */
  double lambda;
  size_t bags;   /* M */
  size_t n_te;   /* 0: default test size */
  size_t block;  /* 0: derived from nu */
  double nu;
  double eta;    /* 0: plain average; otherwise median-of-means level */
  int include_null;
  uint64_t seed;
} rm_monotonize_options;

RM_API void rm_monotonize_options_default(rm_monotonize_options* options);
RM_API rm_status rm_monotonize(const rm_dataset* data, const rm_monotonize_options* options,
                               rm_result** out);
RM_API size_t rm_result_rows(const rm_result* result);
/* risk is NaN and *ok is 0 for candidates that failed. label stays owned by result. */
RM_API rm_status rm_result_row(const rm_result* result, size_t index, const char** label,
                               double* risk, int* ok);
RM_API size_t rm_result_selected(const rm_result* result);
RM_API size_t rm_result_dim(const rm_result* result);
RM_API rm_status rm_result_coefficients(const rm_result* result, double* out, size_t len);
/* Human-readable risk table; owned by result. */
RM_API const char* rm_result_table_text(const rm_result* result);
RM_API void rm_result_free(rm_result* result);

/* Analytic risk profiles. rho2 is the signal energy for every kind; mn1ls
   uses the two-point prior with sparsity epsilon and that energy. */
typedef struct rm_profile_params {
  double rho2;
  double sigma2;
  double epsilon;
  int include_null;
} rm_profile_params;

/* kind: "mn2ls" or "mn1ls". */
RM_API rm_status rm_profile_eval(const char* kind, const rm_profile_params* params, double gamma,
                                 double* value);
RM_API rm_status rm_profile_monotonized(const char* kind, const rm_profile_params* params,
                                        double gamma, double* value);
/* Optimized isotropic mn2ls one-step risk; zeta values may be +inf. */
RM_API rm_status rm_onestep_optimum(double gamma, double rho2, double sigma2, double* risk,
                                    double* zeta1, double* zeta2);
RM_API double rm_snr_star(void);

/* "a:b:k", "a:b:klog" or "v1,v2,...". Free with rm_free_doubles. */
RM_API rm_status rm_parse_grid(const char* text, double** values, size_t* count);
RM_API void rm_free_doubles(double* values);

/* Sweeps. */
RM_API rm_status rm_sweep_config_new(rm_sweep_config** out);
RM_API rm_status rm_sweep_config_read(const char* path, rm_sweep_config** out);
RM_API rm_status rm_sweep_config_set(rm_sweep_config* config, const char* key, const char* value);
RM_API void rm_sweep_config_free(rm_sweep_config* config);
RM_API rm_status rm_sweep_run(const rm_sweep_config* config, rm_curve** out);
RM_API size_t rm_curve_rows(const rm_curve* curve);
/* CSV text of the curve; owned by curve. */
RM_API const char* rm_curve_csv(const rm_curve* curve);
RM_API size_t rm_curve_message_count(const rm_curve* curve);
RM_API const char* rm_curve_message(const rm_curve* curve, size_t index);
RM_API void rm_curve_free(rm_curve* curve);

/* Invariant suite. */
RM_API rm_status rm_selftest_run(rm_selftest_report** out);
RM_API size_t rm_selftest_count(const rm_selftest_report* report);
RM_API rm_status rm_selftest_check(const rm_selftest_report* report, size_t index,
                                   const char** name, int* passed, const char** detail);
RM_API void rm_selftest_free(rm_selftest_report* report);

#ifdef __cplusplus
}
#endif

#endif
