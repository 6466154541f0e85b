/*
 * C interface to the blockmax library.
 *
 * Every function returns a bm_status. On failure the thread-local message
 * returned by bm_last_error_message() describes the problem; on success it is
 * left unchanged. Objects are opaque handles created by the library and
 * released with the matching *_destroy function (which accepts NULL).
 */
#ifndef BLOCKMAX_BLOCKMAX_H
#define BLOCKMAX_BLOCKMAX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BLOCKMAX_BUILDING_LIBRARY)
#    define BM_API __declspec(dllexport)
#  else
#    define BM_API __declspec(dllimport)
#  endif
#else
#  define BM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bm_status {
  BM_OK = 0,
  BM_INVALID_ARGUMENT = 1,
  BM_DOMAIN_ERROR = 2,
  BM_DIMENSION_MISMATCH = 3,
  BM_GUARD_TRIPPED = 4,
  BM_UNSUPPORTED = 5,
  BM_IO_ERROR = 6,
  BM_CONFIG_ERROR = 7,
  BM_INTERNAL_ERROR = 8
} bm_status;

typedef enum bm_block_mode { BM_DISJOINT = 0, BM_SLIDING = 1 } bm_block_mode;

typedef enum bm_asymvar_method {
  BM_METHOD_CLOSED_FORM = 0,
  BM_METHOD_QUADRATURE = 1,
  BM_METHOD_MONTE_CARLO = 2
} bm_asymvar_method;

typedef struct bm_matrix bm_matrix;
typedef struct bm_blocks bm_blocks;
typedef struct bm_experiment bm_experiment;

typedef struct bm_ustat_result {
  double value;
  size_t n_blocks;
  uint64_t pair_count;
} bm_ustat_result;

typedef struct bm_asymvar_result {
  double sigma2_db;
  double sigma2_sb;
  double error_estimate;
  double se_db;
  double se_sb;
  bm_asymvar_method method;
} bm_asymvar_result;

typedef struct bm_truth_result {
  double value;
  double std_error;
  size_t n_truth;
  uint64_t seed;
} bm_truth_result;

BM_API const char* bm_version(void);
BM_API const char* bm_last_error_message(void);
BM_API const char* bm_status_name(bm_status status);

/* Output paths: "-" writes to standard output. */

/* ---- matrices (row-major, rows are observations) ---- */
BM_API bm_status bm_matrix_create(size_t rows, size_t cols, const double* data, bm_matrix** out);
/* Reads a numeric CSV; a leading `t` or `start` column is dropped. */
BM_API bm_status bm_matrix_read_csv(const char* path, bm_matrix** out);
/* Writes `t,x1[,x2...]`. */
BM_API bm_status bm_matrix_write_series_csv(const bm_matrix* m, const char* path);
BM_API size_t bm_matrix_rows(const bm_matrix* m);
BM_API size_t bm_matrix_cols(const bm_matrix* m);
/* Copies all rows*cols values into `out`, which must hold `capacity` doubles. */
BM_API bm_status bm_matrix_copy_data(const bm_matrix* m, double* out, size_t capacity);
BM_API void bm_matrix_destroy(bm_matrix* m);

/* ---- block maxima ---- */
BM_API bm_status bm_block_maxima(const bm_matrix* series, size_t r, bm_block_mode mode, bm_blocks** out);
BM_API size_t bm_blocks_count(const bm_blocks* b);
/* New matrix holding the maxima; release with bm_matrix_destroy. */
BM_API bm_status bm_blocks_maxima(const bm_blocks* b, bm_matrix** out);
/* Writes `start,m1[,m2...]`. */
BM_API bm_status bm_blocks_write_csv(const bm_blocks* b, const char* path);
BM_API void bm_blocks_destroy(bm_blocks* b);

/* ---- U-statistics ----
 * Kernel names: mean, variance, gini, pwm<k> (e.g. pwm2), kendall, spearman. */
BM_API bm_status bm_ustat(const bm_matrix* sample, const char* kernel, bm_ustat_result* out);
/* Sliding-block pairs at least r apart; rows of `sample` are consecutive sliding maxima. */
BM_API bm_status bm_ustat_bias_reduced(const bm_matrix* sample, size_t r, const char* kernel, bm_ustat_result* out);
BM_API bm_status bm_kendall_tau(const bm_matrix* sample, double* out);
BM_API bm_status bm_pwm_orderstat(const bm_matrix* sample, int k, double* out);

/* ---- asymptotic variances ---- */
BM_API bm_status bm_asymvar_variance_kernel(double gamma, bm_asymvar_result* out);
/* Copula spec: independence | comonotone | logistic:<theta>. */
BM_API bm_status bm_asymvar_kendall(const char* copula, size_t n_mc, uint64_t seed, bm_asymvar_result* out);
/* Generic Monte Carlo for the variance kernel under GEV(0, 1, gamma). */
BM_API bm_status bm_asymvar_variance_kernel_mc(double gamma, size_t n_outer, size_t n_inner, uint64_t seed,
                                               bm_asymvar_result* out);
/* Writes `gamma,sigma2_db,sigma2_sb,ratio` for `steps` evenly spaced points. */
BM_API bm_status bm_ratio_curve(double gamma_min, double gamma_max, size_t steps, const char* path);

/* ---- experiments ---- */
BM_API bm_status bm_experiment_load(const char* config_path, bm_experiment** out);
BM_API bm_status bm_experiment_set_master_seed(bm_experiment* e, uint64_t seed);
BM_API bm_status bm_experiment_set_truth_seed(bm_experiment* e, uint64_t seed);
BM_API bm_status bm_experiment_truth(const bm_experiment* e, bm_truth_result* out);
/* Writes the truth as `estimand,value,std_error,n_truth,seed`. */
BM_API bm_status bm_experiment_write_truth(const bm_experiment* e, const char* path);
/* Runs the study and writes the metrics CSV. */
BM_API bm_status bm_experiment_run(const bm_experiment* e, const char* path);
/* One series of length n from the configured model. */
BM_API bm_status bm_experiment_generate(const bm_experiment* e, size_t n, uint64_t seed, bm_matrix** out);
BM_API void bm_experiment_destroy(bm_experiment* e);

#ifdef __cplusplus
}
#endif

#endif
