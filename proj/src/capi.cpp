#include "mccqr.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <limits>
#include <string>

#include "mccqr/calibration.hpp"
#include "mccqr/dataset.hpp"
#include "mccqr/gap_analysis.hpp"
#include "mccqr/lasso.hpp"
#include "mccqr/model_io.hpp"
#include "mccqr/occlusion.hpp"
#include "mccqr/predict.hpp"
#include "mccqr/synthetic.hpp"

struct mccqr_model {
  mccqr::LoadedModel impl;
};
struct mccqr_predictions {
  std::vector<mccqr::PredictiveDistribution> dists;
};
struct mccqr_dataset {
  mccqr::Dataset impl;
};
struct mccqr_atlas {
  mccqr::RegionAtlas impl;
};
struct mccqr_gap_table {
  std::vector<mccqr::GapRecord> records;
};
struct mccqr_occlusion {
  mccqr::OcclusionResult impl;
};
struct mccqr_contrast_fit {
  mccqr::ContrastFit impl;
};

namespace {

thread_local std::string g_last_error;

mccqr_status fail(mccqr_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
mccqr_status guarded(Fn&& fn) {
  try {
    fn();
    return MCCQR_OK;
  } catch (const mccqr::InvalidArgument& e) {
    return fail(MCCQR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const mccqr::DataError& e) {
    return fail(MCCQR_ERR_DATA, e.what());
  } catch (const mccqr::NumericError& e) {
    return fail(MCCQR_ERR_NUMERIC, e.what());
  } catch (const mccqr::IoError& e) {
    return fail(MCCQR_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(MCCQR_ERR_INVALID_ARGUMENT, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mccqr::InvalidArgument(what);
}

mccqr::Matrix matrix_from(const double* x, size_t n, size_t d) {
  require(x != nullptr, "x must not be NULL");
  require(n > 0 && d > 0, "matrix dimensions must be positive");
  mccqr::Matrix m(n, d);
  std::copy(x, x + n * d, m.data().begin());
  return m;
}

mccqr::Vector vector_from(const double* v, size_t n, const char* what) {
  require(v != nullptr, what);
  return mccqr::Vector(v, v + n);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mccqr::TrainConfig convert(const mccqr_train_config* config) {
  require(config != nullptr, "config must not be NULL");
  mccqr::TrainConfig c;
  c.epochs = config->epochs;
  c.learning_rate = config->learning_rate;
  c.batch_size = config->batch_size;
  c.dropout_rate = config->dropout_rate;
  c.quantile_count = config->quantiles;
  c.hidden_units = config->hidden_units;
  c.seed = config->seed;
  return c;
}

const mccqr::MccqrModel& as_mccqr(const mccqr_model* model) {
  require(model != nullptr, "model must not be NULL");
  if (model->impl.kind != mccqr::ModelKind::Mccqr) {
    throw mccqr::InvalidArgument("operation requires an mccqr model");
  }
  return *model->impl.mccqr;
}

std::vector<std::pair<std::string, mccqr::Vector>> covariates_from(
    const char* const* names, const double* const* values, size_t count, size_t rows) {
  std::vector<std::pair<std::string, mccqr::Vector>> out;
  if (count > 0) {
    require(names != nullptr && values != nullptr,
            "covariate names/values must not be NULL when n_covs > 0");
  }
  for (size_t c = 0; c < count; ++c) {
    require(names[c] != nullptr && values[c] != nullptr, "covariate entry is NULL");
    out.emplace_back(names[c], mccqr::Vector(values[c], values[c] + rows));
  }
  return out;
}

std::vector<std::string> names_from(const char* const* names, size_t count) {
  std::vector<std::string> out;
  if (count > 0) require(names != nullptr, "names must not be NULL when count > 0");
  for (size_t c = 0; c < count; ++c) {
    require(names[c] != nullptr, "name entry is NULL");
    out.emplace_back(names[c]);
  }
  return out;
}

mccqr_assoc_stats convert(const mccqr::AssociationStats& s) {
  return {s.estimate, s.f_stat, s.p_value, s.partial_eta_sq, s.df1, s.df2};
}

mccqr::UncertaintyMode convert_mode(mccqr_mode mode) {
  switch (mode) {
    case MCCQR_MODE_FULL: return mccqr::UncertaintyMode::Full;
    case MCCQR_MODE_ALEATORY_ONLY: return mccqr::UncertaintyMode::AleatoryOnly;
    case MCCQR_MODE_EPISTEMIC_ONLY: return mccqr::UncertaintyMode::EpistemicOnly;
  }
  throw mccqr::InvalidArgument("unknown prediction mode");
}

mccqr::SyntheticSpec convert(const mccqr_synth_spec* spec) {
  require(spec != nullptr, "spec must not be NULL");
  mccqr::SyntheticSpec s;
  switch (spec->family) {
    case MCCQR_SYNTH_LINEAR_HETERO: s.family = mccqr::SyntheticFamily::LinearHetero; break;
    case MCCQR_SYNTH_SINE_HETERO: s.family = mccqr::SyntheticFamily::SineHetero; break;
    case MCCQR_SYNTH_AGE_LIKE: s.family = mccqr::SyntheticFamily::AgeLike; break;
    default: throw mccqr::InvalidArgument("unknown synthetic family");
  }
  s.n = spec->n;
  s.d = spec->d;
  s.noise_scale = spec->noise_scale;
  s.seed = spec->seed;
  return s;
}

}  // namespace

extern "C" {

const char* mccqr_version(void) { return "1.0.0"; }

const char* mccqr_last_error(void) { return g_last_error.c_str(); }

void mccqr_string_free(char* s) { delete[] s; }

void mccqr_train_config_defaults(mccqr_train_config* config) {
  if (!config) return;
  const mccqr::TrainConfig d;
  config->epochs = d.epochs;
  config->learning_rate = d.learning_rate;
  config->batch_size = d.batch_size;
  config->dropout_rate = d.dropout_rate;
  config->quantiles = d.quantile_count;
  config->hidden_units = d.hidden_units;
  config->seed = d.seed;
}

mccqr_status mccqr_train(const double* x, size_t n, size_t d, const double* y,
                         const mccqr_train_config* config, mccqr_model** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const mccqr::Matrix features = matrix_from(x, n, d);
    const mccqr::Vector target = vector_from(y, n, "y must not be NULL");
    auto handle = std::make_unique<mccqr_model>();
    handle->impl.kind = mccqr::ModelKind::Mccqr;
    handle->impl.mccqr.emplace(mccqr::train_mccqr(features, target, convert(config)));
    *out = handle.release();
  });
}

mccqr_status mccqr_ann_train(const double* x, size_t n, size_t d, const double* y,
                             const mccqr_train_config* config, mccqr_model** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const mccqr::Matrix features = matrix_from(x, n, d);
    const mccqr::Vector target = vector_from(y, n, "y must not be NULL");
    auto handle = std::make_unique<mccqr_model>();
    handle->impl.kind = mccqr::ModelKind::Ann;
    handle->impl.ann.emplace(mccqr::train_ann(features, target, convert(config)));
    *out = handle.release();
  });
}

mccqr_status mccqr_lasso_train(const double* x, size_t n, size_t d, const double* y,
                               double lambda, size_t max_iters, double tol,
                               mccqr_model** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const mccqr::Matrix features = matrix_from(x, n, d);
    const mccqr::Vector target = vector_from(y, n, "y must not be NULL");
    auto handle = std::make_unique<mccqr_model>();
    handle->impl.kind = mccqr::ModelKind::Lasso;
    handle->impl.lasso = mccqr::train_lasso(features, target, lambda, max_iters, tol);
    *out = handle.release();
  });
}

void mccqr_model_free(mccqr_model* model) { delete model; }

mccqr_status mccqr_model_get_kind(const mccqr_model* model, mccqr_model_kind* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model/out must not be NULL");
    switch (model->impl.kind) {
      case mccqr::ModelKind::Mccqr: *out = MCCQR_MODEL_MCCQR; break;
      case mccqr::ModelKind::Ann: *out = MCCQR_MODEL_ANN; break;
      case mccqr::ModelKind::Lasso: *out = MCCQR_MODEL_LASSO; break;
    }
  });
}

mccqr_status mccqr_model_input_dim(const mccqr_model* model, size_t* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model/out must not be NULL");
    *out = model->impl.raw_input_dim();
  });
}

mccqr_status mccqr_model_parameter_count(const mccqr_model* model, size_t* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model/out must not be NULL");
    switch (model->impl.kind) {
      case mccqr::ModelKind::Mccqr: *out = model->impl.mccqr->parameter_count(); break;
      case mccqr::ModelKind::Ann: *out = model->impl.ann->params().parameter_count(); break;
      case mccqr::ModelKind::Lasso:
        *out = model->impl.lasso->coefficients.size() + 1;
        break;
    }
  });
}

mccqr_status mccqr_model_loss_trace(const mccqr_model* model, double* out, size_t capacity,
                                    size_t* count) {
  return guarded([&] {
    require(model != nullptr && count != nullptr, "model/count must not be NULL");
    const mccqr::Vector* trace = nullptr;
    static const mccqr::Vector kEmpty;
    switch (model->impl.kind) {
      case mccqr::ModelKind::Mccqr: trace = &model->impl.mccqr->loss_trace(); break;
      case mccqr::ModelKind::Ann: trace = &model->impl.ann->loss_trace(); break;
      case mccqr::ModelKind::Lasso: trace = &kEmpty; break;
    }
    *count = trace->size();
    if (out != nullptr) {
      const size_t m = std::min(capacity, trace->size());
      std::copy(trace->begin(), trace->begin() + m, out);
    }
  });
}

mccqr_status mccqr_model_save(const mccqr_model* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "model/path must not be NULL");
    mccqr::save_model(model->impl, path);
  });
}

mccqr_status mccqr_model_load(const char* path, mccqr_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path/out must not be NULL");
    auto handle = std::make_unique<mccqr_model>();
    handle->impl = mccqr::load_model(path);
    *out = handle.release();
  });
}

mccqr_status mccqr_model_to_json(const mccqr_model* model, char** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model/out must not be NULL");
    *out = copy_string(mccqr::model_to_json(model->impl));
  });
}

mccqr_status mccqr_predict(const mccqr_model* model, const double* x, size_t n, size_t d,
                           size_t draws, mccqr_mode mode, uint64_t seed, unsigned threads,
                           mccqr_predictions** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const mccqr::MccqrModel& m = as_mccqr(model);
    const mccqr::Matrix features = matrix_from(x, n, d);
    mccqr::Rng rng(seed);
    auto handle = std::make_unique<mccqr_predictions>();
    handle->dists =
        mccqr::predict_batch(m, features, draws, convert_mode(mode), rng, threads);
    *out = handle.release();
  });
}

void mccqr_predictions_free(mccqr_predictions* p) { delete p; }

size_t mccqr_predictions_count(const mccqr_predictions* p) {
  return p ? p->dists.size() : 0;
}

mccqr_status mccqr_predictions_median(const mccqr_predictions* p, size_t i, double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "predictions/out must not be NULL");
    require(i < p->dists.size(), "sample index out of range");
    *out = p->dists[i].median;
  });
}

mccqr_status mccqr_predictions_sigma(const mccqr_predictions* p, size_t i, double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "predictions/out must not be NULL");
    require(i < p->dists.size(), "sample index out of range");
    *out = p->dists[i].std_dev;
  });
}

mccqr_status mccqr_predictions_quantile(const mccqr_predictions* p, size_t i, double q,
                                        double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "predictions/out must not be NULL");
    require(i < p->dists.size(), "sample index out of range");
    mccqr::Vector sorted = p->dists[i].draws;
    std::sort(sorted.begin(), sorted.end());
    *out = mccqr::empirical_quantile_sorted(sorted, q);
  });
}

mccqr_status mccqr_point_predict(const mccqr_model* model, const double* x, size_t n,
                                 size_t d, size_t draws, uint64_t seed, unsigned threads,
                                 double* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model/out must not be NULL");
    const mccqr::Matrix features = matrix_from(x, n, d);
    switch (model->impl.kind) {
      case mccqr::ModelKind::Mccqr: {
        mccqr::Rng rng(seed);
        const auto dists = mccqr::predict_batch(*model->impl.mccqr, features, draws,
                                                mccqr::UncertaintyMode::Full, rng, threads);
        for (size_t i = 0; i < n; ++i) out[i] = dists[i].median;
        break;
      }
      case mccqr::ModelKind::Ann:
        for (size_t i = 0; i < n; ++i) out[i] = model->impl.ann->predict(features.row(i));
        break;
      case mccqr::ModelKind::Lasso:
        for (size_t i = 0; i < n; ++i) out[i] = model->impl.lasso->predict(features.row(i));
        break;
    }
  });
}

mccqr_status mccqr_crossing_rate(const mccqr_model* model, const double* x, size_t n,
                                 size_t d, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = mccqr::crossing_rate(as_mccqr(model), matrix_from(x, n, d));
  });
}

mccqr_status mccqr_picp(const mccqr_predictions* p, const double* y, size_t n, double level,
                        double* out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "predictions/out must not be NULL");
    require(n == p->dists.size(), "y length must match prediction count");
    *out = mccqr::picp(p->dists, vector_from(y, n, "y must not be NULL"), level);
  });
}

mccqr_status mccqr_picp_curve(const mccqr_predictions* p, const double* y, size_t n,
                              const double* levels, size_t n_levels, double* picp_out,
                              double* mae_out) {
  return guarded([&] {
    require(p != nullptr && picp_out != nullptr, "predictions/picp_out must not be NULL");
    require(n == p->dists.size(), "y length must match prediction count");
    const mccqr::CalibrationReport report =
        mccqr::picp_curve(p->dists, vector_from(y, n, "y must not be NULL"),
                          vector_from(levels, n_levels, "levels must not be NULL"));
    std::copy(report.picp.begin(), report.picp.end(), picp_out);
    if (mae_out) *mae_out = report.mae_median;
  });
}

mccqr_status mccqr_median_abs_error(const double* y_true, const double* y_pred, size_t n,
                                    double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = mccqr::median_abs_error(vector_from(y_true, n, "y_true must not be NULL"),
                                   vector_from(y_pred, n, "y_pred must not be NULL"));
  });
}

mccqr_status mccqr_mae_by_group(const double* y_true, const double* y_pred,
                                const double* group, size_t n, mccqr_group_mae* out,
                                size_t capacity, size_t* count) {
  return guarded([&] {
    require(count != nullptr, "count must not be NULL");
    const auto groups =
        mccqr::mae_by_group(vector_from(y_true, n, "y_true must not be NULL"),
                            vector_from(y_pred, n, "y_pred must not be NULL"),
                            vector_from(group, n, "group must not be NULL"));
    *count = groups.size();
    if (out != nullptr) {
      const size_t m = std::min(capacity, groups.size());
      for (size_t i = 0; i < m; ++i) {
        out[i] = {groups[i].group, groups[i].n, groups[i].mae_median,
                  groups[i].mae_std_ratio};
      }
    }
  });
}

mccqr_status mccqr_interval_coverage(const double* y, const double* lo, const double* hi,
                                     size_t n, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = mccqr::interval_coverage(vector_from(y, n, "y must not be NULL"),
                                    vector_from(lo, n, "lo must not be NULL"),
                                    vector_from(hi, n, "hi must not be NULL"));
  });
}

namespace {

mccqr::CalibrationReport report_from(const double* levels, const double* picp, size_t k,
                                     size_t n_samples, double crossing, double mae) {
  mccqr::CalibrationReport report;
  report.levels = vector_from(levels, k, "levels must not be NULL");
  report.picp = vector_from(picp, k, "picp must not be NULL");
  report.n = n_samples;
  report.crossing_rate = crossing;
  report.mae_median = mae;
  return report;
}

}  // namespace

mccqr_status mccqr_calibration_csv(const double* levels, const double* picp, size_t k,
                                   char** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *out = copy_string(mccqr::calibration_csv(report_from(levels, picp, k, 0, nan, nan)));
  });
}

mccqr_status mccqr_calibration_table(const double* levels, const double* picp, size_t k,
                                     size_t n_samples, double crossing_rate,
                                     double mae_median, char** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = copy_string(mccqr::calibration_table(
        report_from(levels, picp, k, n_samples, crossing_rate, mae_median)));
  });
}

mccqr_status mccqr_calibration_svg(const double* levels, const double* picp, size_t k,
                                   char** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *out = copy_string(mccqr::calibration_svg(report_from(levels, picp, k, 0, nan, nan)));
  });
}

mccqr_status mccqr_compute_gaps(const double* y_true, const double* y_pred,
                                const double* sigma, size_t n, double* bag,
                                double* bag_corrected) {
  return guarded([&] {
    require(y_true != nullptr && y_pred != nullptr && sigma != nullptr,
            "y_true/y_pred/sigma must not be NULL");
    require(bag != nullptr && bag_corrected != nullptr,
            "bag/bag_corrected must not be NULL");
    require(n > 0, "need at least one sample");
    for (size_t i = 0; i < n; ++i) {
      const mccqr::GapRecord rec = mccqr::make_gap_record(y_true[i], y_pred[i], sigma[i]);
      bag[i] = rec.bag;
      bag_corrected[i] = rec.bag_corrected;
    }
  });
}

mccqr_status mccqr_gap_table_create(const double* y_true, const double* y_pred,
                                    const double* sigma, size_t n, mccqr_gap_table** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(y_true != nullptr && y_pred != nullptr && sigma != nullptr,
            "y_true/y_pred/sigma must not be NULL");
    require(n > 0, "need at least one sample");
    auto table = std::make_unique<mccqr_gap_table>();
    table->records.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      table->records.push_back(mccqr::make_gap_record(y_true[i], y_pred[i], sigma[i]));
    }
    *out = table.release();
  });
}

mccqr_status mccqr_gap_table_add_covariate(mccqr_gap_table* table, const char* name,
                                           const double* values) {
  return guarded([&] {
    require(table != nullptr && name != nullptr && values != nullptr,
            "table/name/values must not be NULL");
    for (size_t i = 0; i < table->records.size(); ++i) {
      table->records[i].covariates[name] = values[i];
    }
  });
}

void mccqr_gap_table_free(mccqr_gap_table* table) { delete table; }

mccqr_status mccqr_association_test(const mccqr_gap_table* table, const char* predictor,
                                    const char* const* covariates, size_t n_covariates,
                                    mccqr_assoc_stats* on_bag,
                                    mccqr_assoc_stats* on_bag_corrected) {
  return guarded([&] {
    require(table != nullptr && predictor != nullptr, "table/predictor must not be NULL");
    require(on_bag != nullptr && on_bag_corrected != nullptr, "out must not be NULL");
    const mccqr::AssociationResult result = mccqr::association_test(
        table->records, predictor, names_from(covariates, n_covariates));
    *on_bag = convert(result.on_bag);
    *on_bag_corrected = convert(result.on_bag_corrected);
  });
}

mccqr_status mccqr_association_json(const mccqr_gap_table* table, const char* predictor,
                                    const char* const* covariates, size_t n_covariates,
                                    char** out) {
  return guarded([&] {
    require(table != nullptr && predictor != nullptr && out != nullptr,
            "table/predictor/out must not be NULL");
    *out = copy_string(mccqr::association_json(mccqr::association_test(
        table->records, predictor, names_from(covariates, n_covariates))));
  });
}

mccqr_status mccqr_association_table(const mccqr_gap_table* table, const char* predictor,
                                     const char* const* covariates, size_t n_covariates,
                                     char** out) {
  return guarded([&] {
    require(table != nullptr && predictor != nullptr && out != nullptr,
            "table/predictor/out must not be NULL");
    *out = copy_string(mccqr::association_table(mccqr::association_test(
        table->records, predictor, names_from(covariates, n_covariates))));
  });
}

mccqr_status mccqr_atlas_create(size_t feature_count, mccqr_atlas** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    require(feature_count > 0, "feature_count must be positive");
    auto atlas = std::make_unique<mccqr_atlas>();
    atlas->impl.feature_count = feature_count;
    *out = atlas.release();
  });
}

mccqr_status mccqr_atlas_add_region(mccqr_atlas* atlas, const char* name,
                                    const size_t* indices, size_t count) {
  return guarded([&] {
    require(atlas != nullptr && name != nullptr && indices != nullptr,
            "atlas/name/indices must not be NULL");
    require(count > 0, "region must contain at least one feature");
    atlas->impl.regions.push_back(
        {name, std::vector<std::size_t>(indices, indices + count)});
  });
}

mccqr_status mccqr_atlas_load_csv(const char* path, size_t feature_count,
                                  mccqr_atlas** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path/out must not be NULL");
    auto atlas = std::make_unique<mccqr_atlas>();
    atlas->impl = mccqr::RegionAtlas::from_csv_file(path, feature_count);
    *out = atlas.release();
  });
}

void mccqr_atlas_free(mccqr_atlas* atlas) { delete atlas; }

size_t mccqr_atlas_region_count(const mccqr_atlas* atlas) {
  return atlas ? atlas->impl.regions.size() : 0;
}

const char* mccqr_atlas_region_name(const mccqr_atlas* atlas, size_t i) {
  if (!atlas || i >= atlas->impl.regions.size()) return nullptr;
  return atlas->impl.regions[i].name.c_str();
}

mccqr_status mccqr_occlusion_run(const mccqr_model* model, const double* x, size_t n,
                                 size_t d, const double* y, const mccqr_atlas* atlas,
                                 size_t draws, uint64_t seed, unsigned threads,
                                 mccqr_occlusion** out) {
  return guarded([&] {
    require(atlas != nullptr && out != nullptr, "atlas/out must not be NULL");
    const mccqr::MccqrModel& m = as_mccqr(model);
    const mccqr::Matrix features = matrix_from(x, n, d);
    const mccqr::Vector target = vector_from(y, n, "y must not be NULL");
    mccqr::Rng rng(seed);
    auto occ = std::make_unique<mccqr_occlusion>();
    occ->impl =
        mccqr::occlusion_deltas(m, features, target, atlas->impl, draws, rng, threads);
    *out = occ.release();
  });
}

void mccqr_occlusion_free(mccqr_occlusion* occ) { delete occ; }

size_t mccqr_occlusion_samples(const mccqr_occlusion* occ) {
  return occ ? occ->impl.samples() : 0;
}

size_t mccqr_occlusion_regions(const mccqr_occlusion* occ) {
  return occ ? occ->impl.region_names.size() : 0;
}

mccqr_status mccqr_occlusion_bag_corrected(const mccqr_occlusion* occ, size_t sample,
                                           size_t region, double* out) {
  return guarded([&] {
    require(occ != nullptr && out != nullptr, "occlusion/out must not be NULL");
    require(sample < occ->impl.samples(), "sample index out of range");
    require(region < occ->impl.region_names.size() + 1, "region index out of range");
    *out = occ->impl.bag_corrected(sample, region);
  });
}

mccqr_status mccqr_occlusion_long_csv(const mccqr_occlusion* occ,
                                      const char* const* cov_names,
                                      const double* const* cov_values, size_t n_covs,
                                      char** out) {
  return guarded([&] {
    require(occ != nullptr && out != nullptr, "occlusion/out must not be NULL");
    *out = copy_string(mccqr::occlusion_long_csv(
        occ->impl, covariates_from(cov_names, cov_values, n_covs, occ->impl.samples())));
  });
}

mccqr_status mccqr_region_contrast_fit(const mccqr_occlusion* occ,
                                       const char* const* cov_names,
                                       const double* const* cov_values, size_t n_covs,
                                       mccqr_contrast_fit** out) {
  return guarded([&] {
    require(occ != nullptr && out != nullptr, "occlusion/out must not be NULL");
    auto fit = std::make_unique<mccqr_contrast_fit>();
    fit->impl = mccqr::region_contrast_fit(
        occ->impl, covariates_from(cov_names, cov_values, n_covs, occ->impl.samples()));
    *out = fit.release();
  });
}

void mccqr_contrast_fit_free(mccqr_contrast_fit* fit) { delete fit; }

size_t mccqr_contrast_fit_region_count(const mccqr_contrast_fit* fit) {
  return fit ? fit->impl.regions.size() : 0;
}

mccqr_status mccqr_contrast_fit_region(const mccqr_contrast_fit* fit, size_t i,
                                       mccqr_region_effect* out) {
  return guarded([&] {
    require(fit != nullptr && out != nullptr, "fit/out must not be NULL");
    require(i < fit->impl.regions.size(), "region index out of range");
    const mccqr::RegionEffect& effect = fit->impl.regions[i];
    out->region = effect.region.c_str();
    out->estimate = effect.estimate;
    out->std_error = effect.std_error;
    out->ci_low = effect.ci_low;
    out->ci_high = effect.ci_high;
    out->p_value = effect.p_value;
  });
}

mccqr_status mccqr_contrast_fit_json(const mccqr_contrast_fit* fit, char** out) {
  return guarded([&] {
    require(fit != nullptr && out != nullptr, "fit/out must not be NULL");
    *out = copy_string(mccqr::contrast_fit_json(fit->impl));
  });
}

mccqr_status mccqr_contrast_fit_table(const mccqr_contrast_fit* fit, char** out) {
  return guarded([&] {
    require(fit != nullptr && out != nullptr, "fit/out must not be NULL");
    *out = copy_string(mccqr::contrast_fit_table(fit->impl));
  });
}

mccqr_status mccqr_synth_generate(const mccqr_synth_spec* spec, double* x, double* y,
                                  double* signal) {
  return guarded([&] {
    require(x != nullptr && y != nullptr, "x/y must not be NULL");
    const mccqr::SyntheticData data = mccqr::generate(convert(spec));
    std::copy(data.x.data().begin(), data.x.data().end(), x);
    std::copy(data.y.begin(), data.y.end(), y);
    if (signal) std::copy(data.signal.begin(), data.signal.end(), signal);
  });
}

mccqr_status mccqr_synth_oracle_quantile(const mccqr_synth_spec* spec, double signal,
                                         double tau, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    mccqr::SyntheticData data;
    data.spec = convert(spec);
    *out = data.oracle_quantile_at(signal, tau);
  });
}

mccqr_status mccqr_dataset_read_csv(const char* path, mccqr_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path/out must not be NULL");
    auto ds = std::make_unique<mccqr_dataset>();
    ds->impl = mccqr::Dataset::read_file(path);
    *out = ds.release();
  });
}

void mccqr_dataset_free(mccqr_dataset* ds) { delete ds; }

size_t mccqr_dataset_rows(const mccqr_dataset* ds) { return ds ? ds->impl.rows : 0; }

size_t mccqr_dataset_columns(const mccqr_dataset* ds) {
  return ds ? ds->impl.columns.size() : 0;
}

const char* mccqr_dataset_column_name(const mccqr_dataset* ds, size_t i) {
  if (!ds || i >= ds->impl.columns.size()) return nullptr;
  return ds->impl.columns[i].c_str();
}

int mccqr_dataset_has_column(const mccqr_dataset* ds, const char* name) {
  return ds && name && ds->impl.has_column(name) ? 1 : 0;
}

mccqr_status mccqr_dataset_column(const mccqr_dataset* ds, const char* name, double* out) {
  return guarded([&] {
    require(ds != nullptr && name != nullptr && out != nullptr,
            "dataset/name/out must not be NULL");
    const mccqr::Vector& col = ds->impl.column(name);
    std::copy(col.begin(), col.end(), out);
  });
}

int mccqr_dataset_has_ids(const mccqr_dataset* ds) { return ds && ds->impl.has_ids ? 1 : 0; }

const char* mccqr_dataset_id(const mccqr_dataset* ds, size_t row) {
  if (!ds || row >= ds->impl.ids.size()) return nullptr;
  return ds->impl.ids[row].c_str();
}

mccqr_status mccqr_dataset_feature_count(const mccqr_dataset* ds,
                                         const char* const* exclude, size_t n_exclude,
                                         size_t* out) {
  return guarded([&] {
    require(ds != nullptr && out != nullptr, "dataset/out must not be NULL");
    *out = ds->impl.feature_names(names_from(exclude, n_exclude)).size();
  });
}

mccqr_status mccqr_dataset_features(const mccqr_dataset* ds, const char* const* exclude,
                                    size_t n_exclude, double* out) {
  return guarded([&] {
    require(ds != nullptr && out != nullptr, "dataset/out must not be NULL");
    const mccqr::Matrix m = ds->impl.features(names_from(exclude, n_exclude));
    std::copy(m.data().begin(), m.data().end(), out);
  });
}

mccqr_status mccqr_kfold_assign(size_t n, size_t k, uint64_t seed, size_t* fold_out) {
  return guarded([&] {
    require(fold_out != nullptr, "fold_out must not be NULL");
    const auto folds = mccqr::kfold_assignment(n, k, seed);
    std::copy(folds.begin(), folds.end(), fold_out);
  });
}

}  // extern "C"
