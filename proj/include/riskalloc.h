/*
 * riskalloc — portfolio risk allocation engine.
 *
 * C interface to the shared library: opaque handles, integer status codes,
 * and a thread-local error message. Every constructor-style call writes its
 * result through an out parameter and returns RA_OK on success; on failure
 * the out parameter is untouched and ra_last_error_message() describes the
 * problem for the calling thread.
 */
#ifndef RISKALLOC_H
#define RISKALLOC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ----- status codes ----- */

#define RA_OK 0
#define RA_ERR_INVALID_ARGUMENT 1 /* bad inputs, dimension mismatches */
#define RA_ERR_PARSE 2            /* malformed files */
#define RA_ERR_IO 3               /* filesystem failures */
#define RA_ERR_INSUFFICIENT_DATA 4
#define RA_ERR_DEGENERATE 5       /* zero/unstable denominators */
#define RA_ERR_LIMIT 6            /* configured caps exceeded */
#define RA_ERR_INTERNAL 7

typedef int32_t ra_status;

const char* ra_version(void);
const char* ra_last_error_message(void);
ra_status ra_last_error_code(void);

/* ----- opaque handles ----- */

typedef struct ra_panel ra_panel;
typedef struct ra_measure ra_measure;
typedef struct ra_hierarchy ra_hierarchy;
typedef struct ra_sba_params ra_sba_params;
typedef struct ra_sensitivities ra_sensitivities;
typedef struct ra_result ra_result;
typedef struct ra_mlresult ra_mlresult;

/* ----- run options ----- */

typedef struct ra_options {
    uint64_t pairs;      /* antithetic pair budget for shapley-mc */
    uint64_t seed;       /* counter-based RNG seed */
    int32_t threads;     /* worker cap; results are thread-count invariant */
    int32_t shapley_cap; /* refuse exact Shapley above this n */
} ra_options;

void ra_options_init(ra_options* options);

/* ----- scenario panels ----- */

/* Scenario CSV: header `unit_id,s1,...,sm`, one unit per row. */
ra_status ra_panel_load_csv(const char* path, ra_panel** out);
ra_status ra_panel_write_csv(const ra_panel* panel, const char* path);
/* values is row-major, n x m. */
ra_status ra_panel_create(const char* const* unit_ids, size_t n, size_t m,
                          const double* values, ra_panel** out);
/* mean may be NULL (zeros); covariance is n x n row-major. */
ra_status ra_panel_gaussian(size_t n, const double* mean, const double* covariance,
                            size_t m, uint64_t seed, int32_t threads, ra_panel** out);
/* Equicorrelated convenience: var = sd^2, off-diagonal rho*sd^2. */
ra_status ra_panel_gaussian_equicorr(size_t n, double mean, double sd, double rho,
                                     size_t m, uint64_t seed, int32_t threads,
                                     ra_panel** out);
size_t ra_panel_units(const ra_panel* panel);
size_t ra_panel_scenarios(const ra_panel* panel);
const char* ra_panel_unit_id(const ra_panel* panel, size_t i);
void ra_panel_free(ra_panel* panel);

/* ----- risk measures ----- */

ra_status ra_measure_std(ra_measure** out);
ra_status ra_measure_var(double alpha, ra_measure** out);
ra_status ra_measure_es(double alpha, ra_measure** out);
/* The stressed panel must cover the same unit ids; it is copied. */
ra_status ra_measure_var_svar(double alpha, const ra_panel* stressed, ra_measure** out);
void ra_measure_free(ra_measure* measure);

/* ----- hierarchies ----- */

ra_status ra_hierarchy_load_json(const char* path, ra_hierarchy** out);
/* RA_OK when valid; RA_ERR_INVALID_ARGUMENT with the first violation in
 * ra_last_error_message() otherwise. */
ra_status ra_hierarchy_validate(const ra_hierarchy* hierarchy, size_t n_units);
void ra_hierarchy_free(ra_hierarchy* hierarchy);

/* ----- single-level allocation ----- */

/* strategy: standalone | proportional | marginal | shapley | shapley-mc |
 * liu-abs | liu-max | euler-std | euler-es | euler-var1 | euler-var2 |
 * euler-var-kernel. */
ra_status ra_allocate(const ra_panel* panel, const ra_measure* measure,
                      const char* strategy, const ra_options* options,
                      ra_result** out);

/* repair method: max-prop | abs-prop. */
ra_status ra_repair(const ra_result* result, const char* method, ra_result** out);

size_t ra_result_units(const ra_result* result);
double ra_result_allocation(const ra_result* result, size_t i);
/* RA_ERR_INVALID_ARGUMENT when the strategy reports no standard errors. */
ra_status ra_result_std_error(const ra_result* result, size_t i, double* out);
double ra_result_total(const ra_result* result);
double ra_result_gap(const ra_result* result);
int32_t ra_result_fair(const ra_result* result);
const char* ra_result_strategy(const ra_result* result);
ra_status ra_result_write_csv(const ra_result* result, const ra_panel* panel,
                              const char* path);
ra_status ra_result_write_json(const ra_result* result, const ra_panel* panel,
                               const char* path);
void ra_result_free(ra_result* result);

/* ----- multi-level allocation ----- */

/* method: ptd | ctd | bu. */
ra_status ra_allocate_multilevel(const ra_panel* panel, const ra_measure* measure,
                                 const ra_hierarchy* hierarchy, const char* strategy,
                                 const char* method, const ra_options* options,
                                 ra_mlresult** out);
size_t ra_mlresult_nodes(const ra_mlresult* result);
const char* ra_mlresult_path(const ra_mlresult* result, size_t i);
double ra_mlresult_allocation(const ra_mlresult* result, size_t i);
double ra_mlresult_gap(const ra_mlresult* result, size_t i);
ra_status ra_mlresult_write_csv(const ra_mlresult* result, const char* path);
ra_status ra_mlresult_write_json(const ra_mlresult* result, const char* path);
void ra_mlresult_free(ra_mlresult* result);

/* ----- Monte Carlo traces and convergence sweeps ----- */

/* Writes `pairs,unit_id,estimate,std_error` rows every `stride` pairs. */
ra_status ra_trace_csv(const ra_panel* panel, const ra_measure* measure,
                       const ra_options* options, uint64_t stride, const char* path);

/* Gaussian iid convergence sweep: reallocates at each m in m_grid and writes
 * `m,unit_id,estimate` rows. */
ra_status ra_converge_gaussian_csv(size_t n, double rho, const ra_measure* measure,
                                   const char* strategy, const uint64_t* m_grid,
                                   size_t grid_len, const ra_options* options,
                                   const char* path);

/* ----- FRTB SBA delta equity ----- */

ra_status ra_sba_params_load_json(const char* path, ra_sba_params** out);
void ra_sba_params_free(ra_sba_params* params);

/* Sensitivity CSV: `unit_id,bucket,factor,sensitivity` (1-based indices). */
ra_status ra_sensitivities_load_csv(const char* path, const ra_sba_params* params,
                                    ra_sensitivities** out);
size_t ra_sensitivities_units(const ra_sensitivities* sensitivities);
const char* ra_sensitivities_unit_id(const ra_sensitivities* sensitivities, size_t i);
void ra_sensitivities_free(ra_sensitivities* sensitivities);

/* Portfolio-level SBA measure over all units. */
ra_status ra_sba_measure_value(const ra_sensitivities* sensitivities,
                               const ra_sba_params* params, double* out);

/* Coalition strategies only (no euler variants). */
ra_status ra_sba_allocate(const ra_sensitivities* sensitivities,
                          const ra_sba_params* params, const char* strategy,
                          const ra_options* options, ra_result** out);
ra_status ra_sba_allocate_multilevel(const ra_sensitivities* sensitivities,
                                     const ra_sba_params* params,
                                     const ra_hierarchy* hierarchy,
                                     const char* strategy, const char* method,
                                     const ra_options* options, ra_mlresult** out);
ra_status ra_sba_result_write_csv(const ra_result* result,
                                  const ra_sensitivities* sensitivities,
                                  const char* path);
ra_status ra_sba_result_write_json(const ra_result* result,
                                   const ra_sensitivities* sensitivities,
                                   const char* path);

/* ----- scaling benchmarks ----- */

/* Predicted evaluation count per the standard cost model: n for the linear
 * strategies, n*2^(n-1) for exact Shapley, n*pairs for antithetic MC. */
ra_status ra_count_evaluations(const char* strategy, size_t n, uint64_t pairs,
                               uint64_t* out);

/* Exact-vs-MC wall-clock scan on iid Gaussian panels; writes
 * `n,strategy,evals,median_seconds`. measure: std | var | es. */
ra_status ra_bench_scaling_csv(const char* measure, double alpha, size_t n_lo,
                               size_t n_hi, size_t n_step, size_t m, uint64_t pairs,
                               int32_t exact_cap, int32_t repetitions, uint64_t seed,
                               const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RISKALLOC_H */
