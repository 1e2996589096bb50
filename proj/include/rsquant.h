/* rsquant: L-estimation of population quantiles under ranked set sampling.
 *
 * C interface to the rsquant core. All entry points return rsq_status;
 * results come back through out-parameters. Objects are opaque handles
 * created and destroyed by matching create/destroy calls. On any failure
 * a thread-local message is available from rsq_last_error().
 */
#ifndef RSQUANT_H
#define RSQUANT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RSQ_API __declspec(dllexport)
#else
#define RSQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsq_status {
  RSQ_OK = 0,
  RSQ_ERROR_INVALID_ARGUMENT = 1, /* bad flag, spec string, or handle */
  RSQ_ERROR_DOMAIN = 2,           /* argument outside its mathematical domain */
  RSQ_ERROR_DIMENSION = 3,        /* mismatched lengths or design sizes */
  RSQ_ERROR_IO = 4,               /* file could not be read or written */
  RSQ_ERROR_NUMERIC = 5,          /* quadrature or solver failure */
  RSQ_ERROR_INTERNAL = 6
} rsq_status;

RSQ_API const char* rsq_version(void);

/* Message for the most recent failure on this thread; never NULL. */
RSQ_API const char* rsq_last_error(void);

/* ---- special functions ------------------------------------------------- */

RSQ_API rsq_status rsq_beta_pdf(double a, double b, double t, double* out);
RSQ_API rsq_status rsq_beta_cdf(double a, double b, double t, double* out);

/* ---- distributions ------------------------------------------------------ */

typedef struct rsq_dist rsq_dist;

/* spec: "normal:mean,sd" | "exp:rate" | "weibull:shape,scale" */
RSQ_API rsq_status rsq_dist_create(const char* spec, rsq_dist** out);
RSQ_API void rsq_dist_destroy(rsq_dist* dist);
RSQ_API rsq_status rsq_dist_pdf(const rsq_dist* dist, double y, double* out);
RSQ_API rsq_status rsq_dist_cdf(const rsq_dist* dist, double y, double* out);
RSQ_API rsq_status rsq_dist_quantile(const rsq_dist* dist, double p, double* out);
RSQ_API rsq_status rsq_dist_mean_sd(const rsq_dist* dist, double* mean, double* sd);

/* CDF of the rank-r stratum among sets of size k. */
RSQ_API rsq_status rsq_stratum_cdf(const rsq_dist* dist, int rank, int set_size, double y,
                                   double* out);

/* ---- sampling ----------------------------------------------------------- */

/* n inverse-CDF draws; the stream is a pure function of (seed, replicate). */
RSQ_API rsq_status rsq_srs_sample(const rsq_dist* dist, size_t n, uint64_t master_seed,
                                  uint64_t replicate, double* out_values);

/* One RSS sample of m cycles by k ranks (cycle-major order). rho = 1 ranks
 * perfectly; rho in [0, 1) ranks by the concomitant model. */
RSQ_API rsq_status rsq_rss_sample(const rsq_dist* dist, int m, int k, double rho,
                                  uint64_t master_seed, uint64_t replicate, double* out_values);

/* ---- estimators ---------------------------------------------------------
 * Estimator names: srs_emp, srs_lf, srs_hd (values: any order, length n)
 * and rss_emp, rss_lf, rss_hd, orss_lf, orss_hd (values: the m*k measured
 * RSS values in any order). */

RSQ_API rsq_status rsq_estimate_srs(const char* estimator, const double* values, size_t n,
                                    double p, double* out);
RSQ_API rsq_status rsq_estimate_rss(const char* estimator, const double* values, int m, int k,
                                    double p, double* out);

/* ---- ORSS weight tables -------------------------------------------------- */

typedef struct rsq_weight_table rsq_weight_table;

/* kind: "orss-lf" or "orss-hd". */
RSQ_API rsq_status rsq_weight_table_create(int m, int k, double p, const char* kind,
                                           rsq_weight_table** out);
RSQ_API void rsq_weight_table_destroy(rsq_weight_table* table);
RSQ_API size_t rsq_weight_table_size(const rsq_weight_table* table);
RSQ_API rsq_status rsq_weight_table_weight(const rsq_weight_table* table, size_t index,
                                           double* out);
/* CSV with header m,k,p,kind,i,weight; p carries 17 significant digits. */
RSQ_API rsq_status rsq_weight_table_write_csv(const rsq_weight_table* table, const char* path);

/* G_i(t) and psi_i(t) of the pooled ORSS order statistics (probability scale). */
RSQ_API rsq_status rsq_orss_cdf(int m, int k, int i, double t, double* out);
RSQ_API rsq_status rsq_orss_pdf(int m, int k, int i, double t, double* out);

/* ---- finite populations -------------------------------------------------- */

typedef struct rsq_population rsq_population;

/* Loads paired response/ranker columns from a headered CSV; rows with a
 * missing or non-numeric cell in either column are dropped and counted. */
RSQ_API rsq_status rsq_population_load_csv(const char* path, const char* response_column,
                                           const char* ranker_column, rsq_population** out,
                                           size_t* dropped_rows);
RSQ_API void rsq_population_destroy(rsq_population* pop);
RSQ_API size_t rsq_population_size(const rsq_population* pop);
/* Empirical quantile of the full response column. */
RSQ_API rsq_status rsq_population_truth(const rsq_population* pop, double p, double* out);
/* Spearman correlation between the ranker and response columns. */
RSQ_API rsq_status rsq_population_spearman(const rsq_population* pop, double* out);

/* ---- rank correlations --------------------------------------------------- */

RSQ_API rsq_status rsq_spearman(const double* x, const double* y, size_t n, double* out);
RSQ_API rsq_status rsq_kendall(const double* x, const double* y, size_t n, double* out);

/* ---- experiments ---------------------------------------------------------
 * Configure with the setters, then run. A run produces a result handle whose
 * rows are (distribution, rho, m, k, p, estimator, bias, mse, re, mc_se),
 * with re = mse(srs_emp)/mse(estimator) from the same replicates. Runs are
 * bit-reproducible for a fixed seed regardless of thread count. */

typedef struct rsq_experiment rsq_experiment;
typedef struct rsq_result rsq_result;

RSQ_API rsq_experiment* rsq_experiment_create(void);
RSQ_API void rsq_experiment_destroy(rsq_experiment* cfg);
RSQ_API rsq_status rsq_experiment_set_distribution(rsq_experiment* cfg, const char* spec);
/* The population must outlive the experiment run. label tags result rows. */
RSQ_API rsq_status rsq_experiment_set_population(rsq_experiment* cfg, const rsq_population* pop,
                                                 const char* label);
RSQ_API rsq_status rsq_experiment_add_design(rsq_experiment* cfg, int m, int k);
RSQ_API rsq_status rsq_experiment_add_rho(rsq_experiment* cfg, double rho);
RSQ_API rsq_status rsq_experiment_add_p(rsq_experiment* cfg, double p);
/* comma-separated ids, or "all". */
RSQ_API rsq_status rsq_experiment_set_estimators(rsq_experiment* cfg, const char* ids);
RSQ_API rsq_status rsq_experiment_set_replicates(rsq_experiment* cfg, int64_t replicates);
RSQ_API rsq_status rsq_experiment_set_seed(rsq_experiment* cfg, uint64_t master_seed);
RSQ_API rsq_status rsq_experiment_set_threads(rsq_experiment* cfg, int threads);

RSQ_API rsq_status rsq_experiment_run(const rsq_experiment* cfg, rsq_result** out);

typedef struct rsq_result_row {
  const char* distribution; /* borrowed from the result handle */
  double rho;               /* NaN for population runs */
  int m;
  int k;
  double p;
  const char* estimator;
  double bias;
  double mse;
  double re;
  double mc_se;
} rsq_result_row;

RSQ_API void rsq_result_destroy(rsq_result* result);
RSQ_API size_t rsq_result_row_count(const rsq_result* result);
RSQ_API rsq_status rsq_result_get_row(const rsq_result* result, size_t index,
                                      rsq_result_row* out);
RSQ_API rsq_status rsq_result_write_csv(const rsq_result* result, const char* path);

/* ---- self checks ---------------------------------------------------------
 * Runs the fast identity suite. For each check the callback receives its
 * name and pass flag. inject_fault != 0 perturbs the incomplete beta used
 * by the identity checks (a fixture for exercising failure paths). */

typedef void (*rsq_check_callback)(const char* name, int passed, void* user);
RSQ_API rsq_status rsq_validate(int inject_fault, rsq_check_callback callback, void* user,
                                int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* RSQUANT_H */
