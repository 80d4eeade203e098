/* mccqr: Monte-Carlo-dropout composite quantile regression.
 *
 * C interface to the shared library. All functions return a status code;
 * results come back through out-parameters. On any non-zero status the
 * thread-local message from mccqr_last_error() describes the failure.
 * Handles are opaque and must be released with their matching _free call.
 * Matrices are passed as row-major double arrays.
 */
#ifndef MCCQR_H
#define MCCQR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mccqr_status {
  MCCQR_OK = 0,
  MCCQR_ERR_INVALID_ARGUMENT = 1,
  MCCQR_ERR_DATA = 2,
  MCCQR_ERR_NUMERIC = 3,
  MCCQR_ERR_IO = 4
} mccqr_status;

typedef enum mccqr_mode {
  MCCQR_MODE_FULL = 0,
  MCCQR_MODE_ALEATORY_ONLY = 1,
  MCCQR_MODE_EPISTEMIC_ONLY = 2
} mccqr_mode;

typedef enum mccqr_model_kind {
  MCCQR_MODEL_MCCQR = 0,
  MCCQR_MODEL_ANN = 1,
  MCCQR_MODEL_LASSO = 2
} mccqr_model_kind;

typedef enum mccqr_synth_family {
  MCCQR_SYNTH_LINEAR_HETERO = 0,
  MCCQR_SYNTH_SINE_HETERO = 1,
  MCCQR_SYNTH_AGE_LIKE = 2
} mccqr_synth_family;

typedef struct mccqr_model mccqr_model;
typedef struct mccqr_predictions mccqr_predictions;
typedef struct mccqr_dataset mccqr_dataset;
typedef struct mccqr_atlas mccqr_atlas;
typedef struct mccqr_gap_table mccqr_gap_table;
typedef struct mccqr_occlusion mccqr_occlusion;
typedef struct mccqr_contrast_fit mccqr_contrast_fit;

const char* mccqr_version(void);
/* Message for the most recent failing call on this thread; never NULL. */
const char* mccqr_last_error(void);
/* Frees strings returned through char** out-parameters. */
void mccqr_string_free(char* s);

/* ---- training ---------------------------------------------------------- */

typedef struct mccqr_train_config {
  size_t epochs;        /* default 10 */
  double learning_rate; /* default 0.01 */
  size_t batch_size;    /* default 64 */
  double dropout_rate;  /* default 0.2 */
  size_t quantiles;     /* default 101 */
  size_t hidden_units;  /* default 32 */
  uint64_t seed;        /* default 0 */
} mccqr_train_config;

void mccqr_train_config_defaults(mccqr_train_config* config);

mccqr_status mccqr_train(const double* x, size_t n, size_t d, const double* y,
                         const mccqr_train_config* config, mccqr_model** out);
mccqr_status mccqr_ann_train(const double* x, size_t n, size_t d, const double* y,
                             const mccqr_train_config* config, mccqr_model** out);
mccqr_status mccqr_lasso_train(const double* x, size_t n, size_t d, const double* y,
                               double lambda, size_t max_iters, double tol,
                               mccqr_model** out);

void mccqr_model_free(mccqr_model* model);
mccqr_status mccqr_model_get_kind(const mccqr_model* model, mccqr_model_kind* out);
mccqr_status mccqr_model_input_dim(const mccqr_model* model, size_t* out);
mccqr_status mccqr_model_parameter_count(const mccqr_model* model, size_t* out);
/* Copies up to capacity per-epoch losses; *count gets the full length. */
mccqr_status mccqr_model_loss_trace(const mccqr_model* model, double* out, size_t capacity,
                                    size_t* count);

/* Versioned JSON with lossless float round-trip; contains no training data. */
mccqr_status mccqr_model_save(const mccqr_model* model, const char* path);
mccqr_status mccqr_model_load(const char* path, mccqr_model** out);
mccqr_status mccqr_model_to_json(const mccqr_model* model, char** out);

/* ---- prediction -------------------------------------------------------- */

mccqr_status mccqr_predict(const mccqr_model* model, const double* x, size_t n, size_t d,
                           size_t draws, mccqr_mode mode, uint64_t seed, unsigned threads,
                           mccqr_predictions** out);
void mccqr_predictions_free(mccqr_predictions* p);
size_t mccqr_predictions_count(const mccqr_predictions* p);
mccqr_status mccqr_predictions_median(const mccqr_predictions* p, size_t i, double* out);
mccqr_status mccqr_predictions_sigma(const mccqr_predictions* p, size_t i, double* out);
/* Type-7 empirical quantile of sample i's draws. */
mccqr_status mccqr_predictions_quantile(const mccqr_predictions* p, size_t i, double q,
                                        double* out);

/* Point predictions for any model kind; MCCQR uses the median of `draws`
 * full-mode Monte-Carlo samples, ANN and LASSO are deterministic. */
mccqr_status mccqr_point_predict(const mccqr_model* model, const double* x, size_t n,
                                 size_t d, size_t draws, uint64_t seed, unsigned threads,
                                 double* out);

/* Fraction of adjacent quantile-head pairs that decrease over maskless
 * forward passes (MCCQR models only). */
mccqr_status mccqr_crossing_rate(const mccqr_model* model, const double* x, size_t n,
                                 size_t d, double* out);

/* ---- calibration ------------------------------------------------------- */

mccqr_status mccqr_picp(const mccqr_predictions* p, const double* y, size_t n, double level,
                        double* out);
/* picp_out must hold n_levels entries. */
mccqr_status mccqr_picp_curve(const mccqr_predictions* p, const double* y, size_t n,
                              const double* levels, size_t n_levels, double* picp_out,
                              double* mae_out);
mccqr_status mccqr_median_abs_error(const double* y_true, const double* y_pred, size_t n,
                                    double* out);

/* Per-subgroup error summary; mae_std_ratio is the median absolute error
 * divided by the subgroup's target standard deviation. Two-call pattern:
 * *count always receives the number of distinct groups; up to capacity
 * entries are written when out is non-NULL. */
typedef struct mccqr_group_mae {
  double group;
  size_t n;
  double mae_median;
  double mae_std_ratio;
} mccqr_group_mae;
mccqr_status mccqr_mae_by_group(const double* y_true, const double* y_pred,
                                const double* group, size_t n, mccqr_group_mae* out,
                                size_t capacity, size_t* count);
/* Coverage of precomputed central intervals, bounds inclusive. */
mccqr_status mccqr_interval_coverage(const double* y, const double* lo, const double* hi,
                                     size_t n, double* out);
mccqr_status mccqr_calibration_csv(const double* levels, const double* picp, size_t k,
                                   char** out);
/* crossing_rate/mae may be NaN when unknown. */
mccqr_status mccqr_calibration_table(const double* levels, const double* picp, size_t k,
                                     size_t n_samples, double crossing_rate,
                                     double mae_median, char** out);
mccqr_status mccqr_calibration_svg(const double* levels, const double* picp, size_t k,
                                   char** out);

/* ---- gap analysis ------------------------------------------------------ */

mccqr_status mccqr_compute_gaps(const double* y_true, const double* y_pred,
                                const double* sigma, size_t n, double* bag,
                                double* bag_corrected);

mccqr_status mccqr_gap_table_create(const double* y_true, const double* y_pred,
                                    const double* sigma, size_t n, mccqr_gap_table** out);
mccqr_status mccqr_gap_table_add_covariate(mccqr_gap_table* table, const char* name,
                                           const double* values);
void mccqr_gap_table_free(mccqr_gap_table* table);

typedef struct mccqr_assoc_stats {
  double estimate;
  double f_stat;
  double p_value;
  double partial_eta_sq;
  size_t df1;
  size_t df2;
} mccqr_assoc_stats;

/* Partial F-test for predictor on bag and bag/sigma, controlling for the
 * listed covariates; an "age" covariate is always added when present. */
mccqr_status mccqr_association_test(const mccqr_gap_table* table, const char* predictor,
                                    const char* const* covariates, size_t n_covariates,
                                    mccqr_assoc_stats* on_bag,
                                    mccqr_assoc_stats* on_bag_corrected);
mccqr_status mccqr_association_json(const mccqr_gap_table* table, const char* predictor,
                                    const char* const* covariates, size_t n_covariates,
                                    char** out);
mccqr_status mccqr_association_table(const mccqr_gap_table* table, const char* predictor,
                                     const char* const* covariates, size_t n_covariates,
                                     char** out);

/* ---- occlusion sensitivity -------------------------------------------- */

mccqr_status mccqr_atlas_create(size_t feature_count, mccqr_atlas** out);
mccqr_status mccqr_atlas_add_region(mccqr_atlas* atlas, const char* name,
                                    const size_t* indices, size_t count);
/* CSV with header "region_name,feature_index". */
mccqr_status mccqr_atlas_load_csv(const char* path, size_t feature_count,
                                  mccqr_atlas** out);
void mccqr_atlas_free(mccqr_atlas* atlas);
size_t mccqr_atlas_region_count(const mccqr_atlas* atlas);
const char* mccqr_atlas_region_name(const mccqr_atlas* atlas, size_t i);

mccqr_status mccqr_occlusion_run(const mccqr_model* model, const double* x, size_t n,
                                 size_t d, const double* y, const mccqr_atlas* atlas,
                                 size_t draws, uint64_t seed, unsigned threads,
                                 mccqr_occlusion** out);
void mccqr_occlusion_free(mccqr_occlusion* occ);
size_t mccqr_occlusion_samples(const mccqr_occlusion* occ);
size_t mccqr_occlusion_regions(const mccqr_occlusion* occ);
/* region 0 is the un-occluded reference, region r+1 the r-th atlas region. */
mccqr_status mccqr_occlusion_bag_corrected(const mccqr_occlusion* occ, size_t sample,
                                           size_t region, double* out);
/* Long-format CSV: sample_id, region, region_size, bag_corrected, covariates. */
mccqr_status mccqr_occlusion_long_csv(const mccqr_occlusion* occ,
                                      const char* const* cov_names,
                                      const double* const* cov_values, size_t n_covs,
                                      char** out);

typedef struct mccqr_region_effect {
  const char* region; /* borrowed from the fit handle */
  double estimate;
  double std_error;
  double ci_low;
  double ci_high;
  double p_value;
} mccqr_region_effect;

mccqr_status mccqr_region_contrast_fit(const mccqr_occlusion* occ,
                                       const char* const* cov_names,
                                       const double* const* cov_values, size_t n_covs,
                                       mccqr_contrast_fit** out);
void mccqr_contrast_fit_free(mccqr_contrast_fit* fit);
size_t mccqr_contrast_fit_region_count(const mccqr_contrast_fit* fit);
mccqr_status mccqr_contrast_fit_region(const mccqr_contrast_fit* fit, size_t i,
                                       mccqr_region_effect* out);
mccqr_status mccqr_contrast_fit_json(const mccqr_contrast_fit* fit, char** out);
mccqr_status mccqr_contrast_fit_table(const mccqr_contrast_fit* fit, char** out);

/* ---- synthetic data with known conditional quantiles ------------------- */

typedef struct mccqr_synth_spec {
  mccqr_synth_family family;
  size_t n;
  size_t d;
  double noise_scale;
  uint64_t seed;
} mccqr_synth_spec;

/* x must hold n*d entries, y and signal n entries; signal may be NULL. */
mccqr_status mccqr_synth_generate(const mccqr_synth_spec* spec, double* x, double* y,
                                  double* signal);
/* Closed-form q*(tau | signal). */
mccqr_status mccqr_synth_oracle_quantile(const mccqr_synth_spec* spec, double signal,
                                         double tau, double* out);

/* ---- CSV datasets ------------------------------------------------------ */

mccqr_status mccqr_dataset_read_csv(const char* path, mccqr_dataset** out);
void mccqr_dataset_free(mccqr_dataset* ds);
size_t mccqr_dataset_rows(const mccqr_dataset* ds);
size_t mccqr_dataset_columns(const mccqr_dataset* ds);
const char* mccqr_dataset_column_name(const mccqr_dataset* ds, size_t i);
int mccqr_dataset_has_column(const mccqr_dataset* ds, const char* name);
mccqr_status mccqr_dataset_column(const mccqr_dataset* ds, const char* name, double* out);
int mccqr_dataset_has_ids(const mccqr_dataset* ds);
const char* mccqr_dataset_id(const mccqr_dataset* ds, size_t row);
/* Width of the feature block once the listed columns are excluded. */
mccqr_status mccqr_dataset_feature_count(const mccqr_dataset* ds,
                                         const char* const* exclude, size_t n_exclude,
                                         size_t* out);
/* Row-major feature block; out must hold rows*feature_count entries. */
mccqr_status mccqr_dataset_features(const mccqr_dataset* ds, const char* const* exclude,
                                    size_t n_exclude, double* out);

/* ---- misc -------------------------------------------------------------- */

/* Seeded shuffle dealt round-robin into k folds; fold_out gets n entries. */
mccqr_status mccqr_kfold_assign(size_t n, size_t k, uint64_t seed, size_t* fold_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MCCQR_H */
