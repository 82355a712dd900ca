/*
 * nearcorr C API.
 *
 * Every function returns an nc_status. On failure a human-readable message is
 * available from nc_last_error() until the next call on the same thread.
 * Handles are opaque; each *_free function accepts NULL.
 */
#ifndef NEARCORR_H
#define NEARCORR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(NEARCORR_BUILDING)
#define NEARCORR_API __declspec(dllexport)
#else
#define NEARCORR_API __declspec(dllimport)
#endif
#else
#define NEARCORR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nc_status {
    NC_OK = 0,
    NC_ERR_INVALID_ARGUMENT = 1,
    NC_ERR_DIMENSION = 2,
    NC_ERR_PARSE = 3,
    NC_ERR_ASYMMETRIC = 4,
    NC_ERR_CONVERGENCE = 5,
    NC_ERR_DEGENERATE = 6,
    NC_ERR_MISSING_DATA = 7,
    NC_ERR_INSUFFICIENT_OBSERVATIONS = 8,
    NC_ERR_NON_POSITIVE_DIAGONAL = 9,
    NC_ERR_GENERATION = 10,
    NC_ERR_INTERNAL = 99
} nc_status;

typedef enum nc_missing_policy {
    NC_POLICY_FAIL = 0,
    NC_POLICY_DROP_INCOMPLETE = 1,
    NC_POLICY_PAIRWISE = 2
} nc_missing_policy;

typedef enum nc_method { NC_METHOD_CLIP = 0, NC_METHOD_APD = 1 } nc_method;

typedef struct nc_matrix nc_matrix;
typedef struct nc_panel nc_panel;
typedef struct nc_repair nc_repair;

typedef struct nc_norm_report {
    double frobenius;
    double max;
    double scaled_max;
} nc_norm_report;

typedef struct nc_check_report {
    int is_symmetric;
    double max_asymmetry;
    int unit_diagonal;
    double max_diagonal_deviation;
    double min_eigenvalue;
    int is_psd;
    int is_correlation;
    int offdiag_in_range;
} nc_check_report;

/* Date indices are 0-based and inclusive. */
typedef struct nc_pair_override {
    const char* instrument_a;
    const char* instrument_b;
    size_t first;
    size_t last;
} nc_pair_override;

typedef struct nc_bench_config {
    size_t size;
    size_t trials;
    uint64_t seed;
    double noise;
    double epsilon;
    size_t apd_max_iter;
    double apd_tol;
} nc_bench_config;

typedef struct nc_distance_stats {
    double mean;
    double max;
} nc_distance_stats;

typedef struct nc_method_summary {
    nc_distance_stats frobenius_vs_perturbed;
    nc_distance_stats max_vs_perturbed;
    nc_distance_stats frobenius_vs_original;
    nc_distance_stats max_vs_original;
} nc_method_summary;

typedef struct nc_bench_summary {
    size_t trials;
    nc_method_summary clip;
    nc_method_summary apd;
    double frobenius_ratio;
    size_t apd_dominates;
    size_t clip_max_within_3x;
} nc_bench_summary;

NEARCORR_API const char* nc_last_error(void);
/* Residual carried by the last NC_ERR_CONVERGENCE on this thread. */
NEARCORR_API double nc_last_residual(void);
NEARCORR_API const char* nc_status_name(nc_status status);
NEARCORR_API void nc_string_free(char* text);

/* Matrices. */
NEARCORR_API nc_status nc_matrix_from_array(size_t n, const double* row_major, nc_matrix** out);
NEARCORR_API nc_status nc_matrix_read_csv(const char* text, nc_matrix** out);
NEARCORR_API nc_status nc_matrix_write_csv(const nc_matrix* m, int precision, int with_header, char** out_text);
NEARCORR_API size_t nc_matrix_dim(const nc_matrix* m);
NEARCORR_API nc_status nc_matrix_copy_to(const nc_matrix* m, double* row_major, size_t capacity);
NEARCORR_API size_t nc_matrix_label_count(const nc_matrix* m);
NEARCORR_API const char* nc_matrix_label(const nc_matrix* m, size_t index);
NEARCORR_API void nc_matrix_free(nc_matrix* m);

NEARCORR_API nc_status nc_norms(const nc_matrix* m, nc_norm_report* out);
NEARCORR_API nc_status nc_diff_norms(const nc_matrix* a, const nc_matrix* b, nc_norm_report* out);
/* Eigenvalues in descending order; capacity must be at least nc_matrix_dim(m). */
NEARCORR_API nc_status nc_eigenvalues(const nc_matrix* m, double* values, size_t capacity);

/* Validation and repair. */
NEARCORR_API nc_status nc_check_correlation(const nc_matrix* m, double tol_diag, double tol_psd,
                                            nc_check_report* out);
NEARCORR_API nc_status nc_shrink_repair(const nc_matrix* m, double epsilon, nc_repair** out);
NEARCORR_API nc_status nc_apd_nearest(const nc_matrix* m, size_t max_iter, double tol, nc_repair** out);
NEARCORR_API nc_status nc_diagonal_consistency(const nc_matrix* m, double epsilon, const double* target, size_t n,
                                               double* residual);

NEARCORR_API nc_status nc_repair_matrix(const nc_repair* r, nc_matrix** out);
NEARCORR_API nc_method nc_repair_method(const nc_repair* r);
NEARCORR_API double nc_repair_epsilon(const nc_repair* r);
NEARCORR_API size_t nc_repair_dim(const nc_repair* r);
NEARCORR_API size_t nc_repair_clipped_count(const nc_repair* r);
NEARCORR_API size_t nc_repair_iterations(const nc_repair* r);
NEARCORR_API nc_status nc_repair_shifts(const nc_repair* r, double* shifts, size_t capacity);
NEARCORR_API nc_status nc_repair_input_eigenvalues(const nc_repair* r, double* values, size_t capacity);
NEARCORR_API nc_norm_report nc_repair_distance(const nc_repair* r);
NEARCORR_API void nc_repair_free(nc_repair* r);

/* Time-series panels. */
NEARCORR_API nc_status nc_panel_parse_csv(const char* text, nc_panel** out);
NEARCORR_API size_t nc_panel_instrument_count(const nc_panel* p);
NEARCORR_API size_t nc_panel_date_count(const nc_panel* p);
NEARCORR_API const char* nc_panel_instrument(const nc_panel* p, size_t index);
NEARCORR_API nc_status nc_sample_correlation(const nc_panel* p, nc_missing_policy policy,
                                             const nc_pair_override* overrides, size_t override_count,
                                             nc_matrix** out);
NEARCORR_API void nc_panel_free(nc_panel* p);

/* Benchmark. */
NEARCORR_API nc_bench_config nc_bench_default_config(void);
NEARCORR_API nc_status nc_bench_run(const nc_bench_config* config, nc_bench_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* NEARCORR_H */
