/*
 * bklab C API.
 *
 * Every function returns a bk_status. On failure the thread-local message
 * from bk_last_error() describes the problem; it stays valid until the next
 * failing call on the same thread. Objects behind opaque handles are owned by
 * the library and released with the matching *_free function. Strings
 * returned through char** are released with bk_string_free.
 */
#ifndef BKLAB_H
#define BKLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BKLAB_BUILDING)
#    define BK_API __declspec(dllexport)
#  else
#    define BK_API __declspec(dllimport)
#  endif
#else
#  define BK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bk_status {
  BK_OK = 0,
  BK_ERR_NON_FINITE_INPUT = 1,
  BK_ERR_HORIZON_OVERFLOW = 2,
  BK_ERR_DEGENERATE_SPECTRUM = 3,
  BK_ERR_UNSTABLE_COEFFICIENTS = 4,
  BK_ERR_INVALID_ORDER = 5,
  BK_ERR_INVALID_NOISE = 6,
  BK_ERR_INSUFFICIENT_HORIZON = 7,
  BK_ERR_INVALID_PARAMS = 8,
  BK_ERR_EMPTY_GRID = 9,
  BK_ERR_INFINITE_MOMENT = 10,
  BK_ERR_PARSE = 11,
  BK_ERR_VALIDATION = 12,
  BK_ERR_IO = 13,
  BK_ERR_INVALID_ARGUMENT = 14,
  BK_ERR_INTERNAL = 15
} bk_status;

typedef enum bk_noise_family {
  BK_NOISE_NORMAL = 0,
  BK_NOISE_RADEMACHER = 1,
  BK_NOISE_UNIFORM = 2,    /* param1 = half-width c */
  BK_NOISE_STUDENT_T = 3,  /* param1 = degrees of freedom */
  BK_NOISE_PARETO = 4      /* param1 = alpha, param2 = x_min */
} bk_noise_family;

/* Values equal the CLI exit codes. */
typedef enum bk_verdict {
  BK_VERDICT_STABILIZED = 0,
  BK_VERDICT_FLOOR_LIMITED = 2,
  BK_VERDICT_GROWING = 3
} bk_verdict;

typedef struct bk_noise {
  bk_noise_family family;
  double param1;
  double param2;
} bk_noise;

typedef struct bk_spectrum {
  double lambda1_re, lambda1_im;
  double lambda2_re, lambda2_im;
  double rho;
  double discriminant;
  int mu;
} bk_spectrum;

typedef struct bk_bound_report {
  double l_star;
  double cum_limit;
  double koval_ratio_min;
  double koval_ratio_max;
  uint64_t horizon_used;
} bk_bound_report;

typedef struct bk_tail_estimate {
  uint64_t n;
  double p_hat;
  uint64_t replications;
  double ci_low;
  double ci_high;
  int at_floor;
} bk_tail_estimate;

typedef struct bk_series_row {
  uint64_t n;
  double p_hat;
  double ci_low;
  double ci_high;
  double term;
  double partial_sum;
  double partial_sum_ci_high;
  int at_floor;
} bk_series_row;

typedef struct bk_config_values {
  double a, b;
  double p, r, epsilon;
  bk_noise noise;
  uint64_t grid_max;
  uint64_t replications;
  uint64_t seed;
} bk_config_values;

typedef struct bk_slope_report {
  double slope;
  double intercept;
  double bound;
} bk_slope_report;

typedef struct bk_config bk_config;
typedef struct bk_series bk_series;

BK_API const char* bk_version(void);
BK_API const char* bk_status_name(bk_status status);
BK_API const char* bk_last_error(void);
BK_API void bk_string_free(char* s);

/* Deterministic core. Weight arrays have horizon + 1 entries. */
BK_API bk_status bk_classify_stability(double a, double b, int* stable);
BK_API bk_status bk_companion_spectrum(double a, double b, bk_spectrum* out);
BK_API bk_status bk_weight_sequence(double a, double b, size_t horizon, double* u, double* cum);
BK_API bk_status bk_weight_closed_form(double a, double b, size_t s, double* out);
BK_API bk_status bk_companion_power_column(double a, double b, size_t s, double* top,
                                           double* bottom);
BK_API bk_status bk_compute_bound_report(double a, double b, size_t horizon, bk_bound_report* out);

/* Innovations. */
BK_API bk_status bk_absolute_moment(const bk_noise* noise, double r, double* value, int* infinite);
BK_API bk_status bk_sample_block(const bk_noise* noise, size_t count, uint64_t seed,
                                 uint32_t purpose, uint64_t n, uint64_t block, double* out);

/* Paths; xi may be NULL. */
BK_API bk_status bk_simulate_path(double a, double b, const double* theta, size_t n, double* xi,
                                  double* s_n);
BK_API bk_status bk_weighted_sum(double a, double b, const double* theta, size_t n, double* out);
BK_API bk_status bk_representation_residual(double a, double b, const double* theta, size_t n,
                                            double* out);

/* Monte Carlo. */
BK_API bk_status bk_tail_probability(double a, double b, const bk_noise* noise, double p, double r,
                                     double epsilon, uint64_t n, uint64_t replications,
                                     uint64_t seed, bk_tail_estimate* out);
BK_API bk_status bk_moment_growth(double a, double b, const bk_noise* noise, double r,
                                  const uint64_t* n_grid, size_t grid_len, uint64_t replications,
                                  uint64_t seed, bk_slope_report* out);

/* Experiment configuration. */
BK_API bk_status bk_config_parse(const char* text, bk_config** out);
BK_API bk_status bk_config_load(const char* path, bk_config** out);
BK_API void bk_config_free(bk_config* config);
BK_API bk_status bk_config_get(const bk_config* config, bk_config_values* out);
BK_API const char* bk_config_output(const bk_config* config);
BK_API bk_status bk_config_set_seed(bk_config* config, uint64_t seed);
BK_API bk_status bk_config_set_replications(bk_config* config, uint64_t replications);
BK_API bk_status bk_config_set_output(bk_config* config, const char* output);
BK_API bk_status bk_config_render(const bk_config* config, char** text);

/* Partial series over the config's default grid, without writing files. */
BK_API bk_status bk_series_run(const bk_config* config, bk_series** out);
BK_API void bk_series_free(bk_series* series);
BK_API size_t bk_series_size(const bk_series* series);
BK_API bk_status bk_series_row_at(const bk_series* series, size_t index, bk_series_row* out);
BK_API bk_verdict bk_series_verdict(const bk_series* series);
BK_API bk_status bk_series_csv(const bk_series* series, char** text);

/* Full pipeline; writes <output>.series.csv, .spectrum.csv, .summary.txt. */
BK_API bk_status bk_run(const bk_config* config, bk_verdict* verdict, char** summary);

/* Text reports used by the CLI subcommands. */
BK_API bk_status bk_spectrum_report(const bk_config* config, char** text, char** csv);
BK_API bk_status bk_weights_csv(const bk_config* config, size_t horizon, char** csv);
BK_API bk_status bk_paths_csv(const bk_config* config, uint64_t paths, char** csv);
BK_API bk_status bk_verify(const bk_config* config, int* failures, char** report);

#ifdef __cplusplus
}
#endif

#endif /* BKLAB_H */
