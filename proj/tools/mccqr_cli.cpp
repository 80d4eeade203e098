// Command-line front end for the mccqr shared library. Every subcommand is a
// pure function of its inputs, flags and seed; reruns reproduce outputs
// byte for byte.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mccqr.h"

namespace {

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(mccqr_status status) {
  switch (status) {
    case MCCQR_OK: return 0;
    case MCCQR_ERR_DATA:
    case MCCQR_ERR_IO: return 2;
    case MCCQR_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

void check(mccqr_status status) {
  if (status != MCCQR_OK) throw CliError{exit_code_for(status), mccqr_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) { throw CliError{1, message}; }
[[noreturn]] void data_error(const std::string& message) { throw CliError{2, message}; }

// Shortest round-trip decimal form.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string owned_string(char* s) {
  std::string out = s ? s : "";
  mccqr_string_free(s);
  return out;
}

template <typename T, void (*FreeFn)(T*)>
using Handle = std::unique_ptr<T, decltype([](T* p) { FreeFn(p); })>;

using ModelHandle = Handle<mccqr_model, mccqr_model_free>;
using PredictionsHandle = Handle<mccqr_predictions, mccqr_predictions_free>;
using DatasetHandle = Handle<mccqr_dataset, mccqr_dataset_free>;
using AtlasHandle = Handle<mccqr_atlas, mccqr_atlas_free>;
using GapTableHandle = Handle<mccqr_gap_table, mccqr_gap_table_free>;
using OcclusionHandle = Handle<mccqr_occlusion, mccqr_occlusion_free>;
using ContrastHandle = Handle<mccqr_contrast_fit, mccqr_contrast_fit_free>;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_levels(const std::string& csv) {
  std::vector<double> out;
  for (const auto& item : split_list(csv)) {
    double level = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), level);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      usage_error("--levels: cannot parse '" + item + "'");
    }
    if (!(level > 0.0 && level < 1.0)) {
      usage_error("--levels: level " + item + " must lie in (0, 1)");
    }
    out.push_back(level);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) data_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) data_error("failed writing '" + path + "'");
}

// ---- dataset access ------------------------------------------------------

struct Table {
  DatasetHandle ds;
  std::size_t rows = 0;
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  bool has_ids = false;

  static Table open(const std::string& path) {
    Table table;
    mccqr_dataset* raw = nullptr;
    check(mccqr_dataset_read_csv(path.c_str(), &raw));
    table.ds.reset(raw);
    table.rows = mccqr_dataset_rows(raw);
    const std::size_t cols = mccqr_dataset_columns(raw);
    for (std::size_t i = 0; i < cols; ++i) table.columns.push_back(mccqr_dataset_column_name(raw, i));
    table.has_ids = mccqr_dataset_has_ids(raw) != 0;
    for (std::size_t i = 0; i < table.rows; ++i) table.ids.push_back(mccqr_dataset_id(raw, i));
    return table;
  }

  bool has(const std::string& name) const {
    return mccqr_dataset_has_column(ds.get(), name.c_str()) != 0;
  }

  std::vector<double> column(const std::string& name) const {
    std::vector<double> out(rows);
    check(mccqr_dataset_column(ds.get(), name.c_str(), out.data()));
    return out;
  }

  std::vector<double> features(const std::vector<std::string>& exclude,
                               std::size_t* d_out) const {
    std::vector<const char*> names;
    for (const auto& name : exclude) names.push_back(name.c_str());
    std::size_t d = 0;
    check(mccqr_dataset_feature_count(ds.get(), names.data(), names.size(), &d));
    std::vector<double> out(rows * d);
    check(mccqr_dataset_features(ds.get(), names.data(), names.size(), out.data()));
    *d_out = d;
    return out;
  }

  std::vector<std::string> feature_names(const std::vector<std::string>& exclude) const {
    std::vector<std::string> out;
    for (const auto& name : columns) {
      if (std::find(exclude.begin(), exclude.end(), name) == exclude.end()) {
        out.push_back(name);
      }
    }
    return out;
  }
};

ModelHandle load_model(const std::string& path) {
  mccqr_model* raw = nullptr;
  check(mccqr_model_load(path.c_str(), &raw));
  return ModelHandle(raw);
}

mccqr_mode parse_mode(const std::string& mode) {
  if (mode == "full") return MCCQR_MODE_FULL;
  if (mode == "aleatory") return MCCQR_MODE_ALEATORY_ONLY;
  if (mode == "epistemic") return MCCQR_MODE_EPISTEMIC_ONLY;
  usage_error("--mode must be full, aleatory or epistemic (got '" + mode + "')");
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string family = "linear-hetero";
  std::size_t n = 1000;
  std::size_t d = 0;  // 0 = family default
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
  std::string out_prefix;
};

int run_synth(const SynthArgs& args) {
  mccqr_synth_spec spec{};
  if (args.family == "linear-hetero") {
    spec.family = MCCQR_SYNTH_LINEAR_HETERO;
  } else if (args.family == "sine-hetero") {
    spec.family = MCCQR_SYNTH_SINE_HETERO;
  } else if (args.family == "age-like") {
    spec.family = MCCQR_SYNTH_AGE_LIKE;
  } else {
    usage_error("--family must be linear-hetero, sine-hetero or age-like");
  }
  spec.n = args.n;
  spec.d = args.d > 0 ? args.d : (spec.family == MCCQR_SYNTH_AGE_LIKE ? 20 : 1);
  spec.noise_scale = args.noise_scale;
  spec.seed = args.seed;

  std::vector<double> x(spec.n * spec.d), y(spec.n), signal(spec.n);
  check(mccqr_synth_generate(&spec, x.data(), y.data(), signal.data()));

  // Training file: features plus the target column.
  std::string data_csv = "id";
  for (std::size_t j = 0; j < spec.d; ++j) data_csv += ",x" + std::to_string(j);
  data_csv += ",y\n";
  for (std::size_t i = 0; i < spec.n; ++i) {
    data_csv += std::to_string(i);
    for (std::size_t j = 0; j < spec.d; ++j) data_csv += "," + fmt(x[i * spec.d + j]);
    data_csv += "," + fmt(y[i]) + "\n";
  }
  write_file(args.out_prefix + "_data.csv", data_csv);

  std::string targets_csv = "id,y\n";
  for (std::size_t i = 0; i < spec.n; ++i) {
    targets_csv += std::to_string(i) + "," + fmt(y[i]) + "\n";
  }
  write_file(args.out_prefix + "_targets.csv", targets_csv);

  std::string oracle_json = "{\n";
  oracle_json += "  \"family\": \"" + args.family + "\",\n";
  oracle_json += "  \"n\": " + std::to_string(spec.n) + ",\n";
  oracle_json += "  \"d\": " + std::to_string(spec.d) + ",\n";
  oracle_json += "  \"noise_scale\": " + fmt(spec.noise_scale) + ",\n";
  oracle_json += "  \"seed\": " + std::to_string(spec.seed) + "\n";
  oracle_json += "}\n";
  write_file(args.out_prefix + "_oracle.json", oracle_json);

  std::cerr << "wrote " << args.out_prefix << "_data.csv (" << spec.n << " rows, " << spec.d
            << " features), _targets.csv, _oracle.json\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string target = "y";
  mccqr_train_config config{};
  std::string model_out;
};

int run_train(const TrainArgs& args) {
  const Table table = Table::open(args.data);
  if (!table.has(args.target)) {
    data_error(args.data + ": no target column '" + args.target + "'");
  }
  std::size_t d = 0;
  const std::vector<double> x = table.features({args.target}, &d);
  const std::vector<double> y = table.column(args.target);

  mccqr_model* raw = nullptr;
  check(mccqr_train(x.data(), table.rows, d, y.data(), &args.config, &raw));
  const ModelHandle model(raw);

  std::size_t epochs = 0;
  check(mccqr_model_loss_trace(raw, nullptr, 0, &epochs));
  std::vector<double> trace(epochs);
  check(mccqr_model_loss_trace(raw, trace.data(), trace.size(), &epochs));
  for (std::size_t e = 0; e < trace.size(); ++e) {
    std::cerr << "epoch " << (e + 1) << "/" << trace.size() << " mean loss " << fmt(trace[e])
              << "\n";
  }

  check(mccqr_model_save(raw, args.model_out.c_str()));
  std::size_t params = 0;
  check(mccqr_model_parameter_count(raw, &params));
  std::cerr << "saved model (" << params << " parameters, " << table.rows << "x" << d
            << " training data) to " << args.model_out << "\n";
  return 0;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string data;
  std::string target = "y";
  std::size_t draws = 1000;
  std::string mode = "full";
  std::uint64_t seed = 0;
  std::string levels;
  unsigned threads = 1;
  std::string out;
};

int run_predict(const PredictArgs& args) {
  const mccqr_mode mode = parse_mode(args.mode);
  const std::vector<double> levels = parse_levels(args.levels);
  const ModelHandle model = load_model(args.model);
  mccqr_model_kind kind{};
  check(mccqr_model_get_kind(model.get(), &kind));
  if (kind != MCCQR_MODEL_MCCQR) {
    usage_error("predict needs an mccqr model; use bench for ann/lasso comparisons");
  }

  const Table table = Table::open(args.data);
  std::vector<std::string> exclude;
  if (table.has(args.target)) exclude.push_back(args.target);
  std::size_t d = 0;
  const std::vector<double> x = table.features(exclude, &d);
  std::size_t expected = 0;
  check(mccqr_model_input_dim(model.get(), &expected));
  if (d != expected) {
    data_error(args.data + ": has " + std::to_string(d) + " feature columns, model expects " +
               std::to_string(expected));
  }

  mccqr_predictions* raw = nullptr;
  check(mccqr_predict(model.get(), x.data(), table.rows, d, args.draws,
                      mode, args.seed, args.threads, &raw));
  const PredictionsHandle preds(raw);

  std::string csv = "id,y_pred_median,sigma";
  for (double level : levels) {
    csv += ",lo_" + fmt(level) + ",hi_" + fmt(level);
  }
  csv += "\n";
  for (std::size_t i = 0; i < table.rows; ++i) {
    double med = 0.0, sigma = 0.0;
    check(mccqr_predictions_median(raw, i, &med));
    check(mccqr_predictions_sigma(raw, i, &sigma));
    csv += table.ids[i] + "," + fmt(med) + "," + fmt(sigma);
    for (double level : levels) {
      double lo = 0.0, hi = 0.0;
      check(mccqr_predictions_quantile(raw, i, (1.0 - level) / 2.0, &lo));
      check(mccqr_predictions_quantile(raw, i, (1.0 + level) / 2.0, &hi));
      csv += "," + fmt(lo) + "," + fmt(hi);
    }
    csv += "\n";
  }
  write_file(args.out, csv);
  std::cerr << "wrote " << table.rows << " predictions (" << args.draws << " draws, mode "
            << args.mode << ") to " << args.out << "\n";
  return 0;
}

// ---- picp ------------------------------------------------------------------

struct PicpArgs {
  std::string pred;
  std::string truth;
  std::string target = "y";
  std::string levels;
  std::string out;    // empty = stdout
  std::string svg;    // optional
  bool table = false;
};

int run_picp(const PicpArgs& args) {
  const Table pred = Table::open(args.pred);
  const Table truth = Table::open(args.truth);
  if (pred.rows != truth.rows) {
    data_error("prediction file has " + std::to_string(pred.rows) + " rows, truth has " +
               std::to_string(truth.rows));
  }
  if (pred.has_ids && truth.has_ids && pred.ids != truth.ids) {
    data_error("prediction and truth id columns disagree");
  }
  if (!truth.has(args.target)) {
    data_error(args.truth + ": no target column '" + args.target + "'");
  }
  const std::vector<double> y = truth.column(args.target);
  if (!pred.has("y_pred_median")) {
    data_error(args.pred + ": missing 'y_pred_median' (not a predict output file?)");
  }
  const std::vector<double> medians = pred.column("y_pred_median");

  // Levels default to every lo_*/hi_* pair present in the prediction file.
  std::vector<double> levels;
  if (!args.levels.empty()) {
    levels = parse_levels(args.levels);
  } else {
    for (const auto& name : pred.columns) {
      if (name.rfind("lo_", 0) == 0) {
        const std::string tail = name.substr(3);
        double level = 0.0;
        const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), level);
        if (res.ec == std::errc{} && res.ptr == tail.data() + tail.size()) {
          levels.push_back(level);
        }
      }
    }
    std::sort(levels.begin(), levels.end());
    if (levels.empty()) {
      data_error(args.pred +
                 ": no interval columns found; run predict with --levels to emit them");
    }
  }

  std::vector<double> picp(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::string lo_name = "lo_" + fmt(levels[l]);
    const std::string hi_name = "hi_" + fmt(levels[l]);
    if (!pred.has(lo_name) || !pred.has(hi_name)) {
      data_error(args.pred + ": missing interval columns '" + lo_name + "'/'" + hi_name +
                 "' for level " + fmt(levels[l]));
    }
    const std::vector<double> lo = pred.column(lo_name);
    const std::vector<double> hi = pred.column(hi_name);
    check(mccqr_interval_coverage(y.data(), lo.data(), hi.data(), y.size(), &picp[l]));
  }

  double mae = 0.0;
  check(mccqr_median_abs_error(y.data(), medians.data(), y.size(), &mae));

  char* text = nullptr;
  if (args.table) {
    check(mccqr_calibration_table(levels.data(), picp.data(), levels.size(), y.size(),
                                  std::numeric_limits<double>::quiet_NaN(), mae, &text));
  } else {
    check(mccqr_calibration_csv(levels.data(), picp.data(), levels.size(), &text));
  }
  const std::string report = owned_string(text);
  if (args.out.empty()) {
    std::cout << report;
  } else {
    write_file(args.out, report);
  }
  std::cerr << "mae_median " << fmt(mae) << " over " << y.size() << " samples\n";

  if (!args.svg.empty()) {
    char* svg = nullptr;
    check(mccqr_calibration_svg(levels.data(), picp.data(), levels.size(), &svg));
    write_file(args.svg, owned_string(svg));
  }
  return 0;
}

// ---- assoc -----------------------------------------------------------------

struct AssocArgs {
  std::string gaps;
  std::string predictor;
  std::string covariates;
  std::string response = "both";  // bag | bagc | both
  std::string out;                // empty = stdout
};

int run_assoc(const AssocArgs& args) {
  if (args.response != "bag" && args.response != "bagc" && args.response != "both") {
    usage_error("--response must be bag, bagc or both");
  }
  const Table table = Table::open(args.gaps);
  for (const char* required : {"y_true", "y_pred", "sigma"}) {
    if (!table.has(required)) {
      data_error(args.gaps + ": missing required column '" + std::string(required) + "'");
    }
  }
  const std::vector<double> y_true = table.column("y_true");
  const std::vector<double> y_pred = table.column("y_pred");
  const std::vector<double> sigma = table.column("sigma");

  mccqr_gap_table* raw = nullptr;
  check(mccqr_gap_table_create(y_true.data(), y_pred.data(), sigma.data(), table.rows, &raw));
  const GapTableHandle gaps(raw);

  // Every remaining numeric column is available as a covariate; the library
  // auto-includes "age" when present.
  std::vector<std::string> available;
  for (const auto& name : table.columns) {
    if (name == "y_true" || name == "y_pred" || name == "sigma") continue;
    const std::vector<double> values = table.column(name);
    check(mccqr_gap_table_add_covariate(raw, name.c_str(), values.data()));
    available.push_back(name);
  }
  if (std::find(available.begin(), available.end(), args.predictor) == available.end()) {
    data_error(args.gaps + ": no predictor column '" + args.predictor + "'");
  }

  const std::vector<std::string> covariates = split_list(args.covariates);
  std::vector<const char*> cov_ptrs;
  for (const auto& name : covariates) {
    if (std::find(available.begin(), available.end(), name) == available.end()) {
      data_error(args.gaps + ": no covariate column '" + name + "'");
    }
    cov_ptrs.push_back(name.c_str());
  }

  char* json_raw = nullptr;
  check(mccqr_association_json(raw, args.predictor.c_str(), cov_ptrs.data(), cov_ptrs.size(),
                               &json_raw));
  std::string json = owned_string(json_raw);

  if (args.response != "both") {
    // Re-emit only the requested block, keeping the document shape.
    mccqr_assoc_stats bag{}, bagc{};
    check(mccqr_association_test(raw, args.predictor.c_str(), cov_ptrs.data(),
                                 cov_ptrs.size(), &bag, &bagc));
    const mccqr_assoc_stats& s = args.response == "bag" ? bag : bagc;
    json = "{\n  \"predictor\": \"" + args.predictor + "\",\n  \"response\": \"" +
           args.response + "\",\n  \"term\": \"" + args.predictor + "\",\n  \"estimate\": " +
           fmt(s.estimate) + ",\n  \"F\": " + fmt(s.f_stat) + ",\n  \"df1\": " +
           std::to_string(s.df1) + ",\n  \"df2\": " + std::to_string(s.df2) + ",\n  \"p\": " +
           fmt(s.p_value) + ",\n  \"partial_eta_sq\": " + fmt(s.partial_eta_sq) + "\n}\n";
  }

  if (args.out.empty()) {
    std::cout << json;
  } else {
    write_file(args.out, json);
  }

  char* table_raw = nullptr;
  check(mccqr_association_table(raw, args.predictor.c_str(), cov_ptrs.data(),
                                cov_ptrs.size(), &table_raw));
  std::cerr << owned_string(table_raw);
  return 0;
}

// ---- occlude ---------------------------------------------------------------

struct OccludeArgs {
  std::string model;
  std::string data;
  std::string atlas;
  std::string target = "y";
  std::string covariates;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string summary_out;  // empty = stdout
};

int run_occlude(const OccludeArgs& args) {
  const ModelHandle model = load_model(args.model);
  const Table table = Table::open(args.data);
  if (!table.has(args.target)) {
    data_error(args.data + ": no target column '" + args.target + "'");
  }
  const std::vector<std::string> extra_covs = split_list(args.covariates);
  std::vector<std::string> exclude = extra_covs;
  exclude.push_back(args.target);

  std::size_t d = 0;
  const std::vector<double> x = table.features(exclude, &d);
  const std::vector<double> y = table.column(args.target);
  std::size_t expected = 0;
  check(mccqr_model_input_dim(model.get(), &expected));
  if (d != expected) {
    data_error(args.data + ": has " + std::to_string(d) + " feature columns, model expects " +
               std::to_string(expected));
  }

  mccqr_atlas* atlas_raw = nullptr;
  check(mccqr_atlas_load_csv(args.atlas.c_str(), d, &atlas_raw));
  const AtlasHandle atlas(atlas_raw);

  mccqr_occlusion* occ_raw = nullptr;
  check(mccqr_occlusion_run(model.get(), x.data(), table.rows, d, y.data(), atlas_raw,
                            args.draws, args.seed, args.threads, &occ_raw));
  const OcclusionHandle occ(occ_raw);

  // The target doubles as the chronological-age covariate; extra columns are
  // passed through by name.
  std::vector<std::string> cov_names{"age"};
  std::vector<std::vector<double>> cov_values{y};
  for (const auto& name : extra_covs) {
    if (name == "age") continue;
    if (!table.has(name)) data_error(args.data + ": no covariate column '" + name + "'");
    cov_names.push_back(name);
    cov_values.push_back(table.column(name));
  }
  std::vector<const char*> name_ptrs;
  std::vector<const double*> value_ptrs;
  for (std::size_t c = 0; c < cov_names.size(); ++c) {
    name_ptrs.push_back(cov_names[c].c_str());
    value_ptrs.push_back(cov_values[c].data());
  }

  char* csv_raw = nullptr;
  check(mccqr_occlusion_long_csv(occ_raw, name_ptrs.data(), value_ptrs.data(),
                                 name_ptrs.size(), &csv_raw));
  write_file(args.out, owned_string(csv_raw));

  mccqr_contrast_fit* fit_raw = nullptr;
  check(mccqr_region_contrast_fit(occ_raw, name_ptrs.data(), value_ptrs.data(),
                                  name_ptrs.size(), &fit_raw));
  const ContrastHandle fit(fit_raw);

  char* json_raw = nullptr;
  check(mccqr_contrast_fit_json(fit_raw, &json_raw));
  const std::string json = owned_string(json_raw);
  if (args.summary_out.empty()) {
    std::cout << json;
  } else {
    write_file(args.summary_out, json);
  }
  char* table_raw = nullptr;
  check(mccqr_contrast_fit_table(fit_raw, &table_raw));
  std::cerr << owned_string(table_raw);
  std::cerr << "wrote long-format rows to " << args.out << "\n";
  return 0;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string data;
  std::string target = "y";
  std::string models = "mccqr,ann,lasso";
  std::size_t folds = 5;
  std::string group_column;
  std::uint64_t seed = 0;
  std::size_t draws = 1000;
  double lambda = 1.0;
  unsigned threads = 1;
  mccqr_train_config config{};
  std::string out;  // optional per-fold csv
};

int run_bench(const BenchArgs& args) {
  const Table table = Table::open(args.data);
  if (!table.has(args.target)) {
    data_error(args.data + ": no target column '" + args.target + "'");
  }
  std::vector<std::string> exclude{args.target};
  if (!args.group_column.empty()) {
    if (!table.has(args.group_column)) {
      data_error(args.data + ": no group column '" + args.group_column + "'");
    }
    exclude.push_back(args.group_column);
  }
  std::size_t d = 0;
  const std::vector<double> x = table.features(exclude, &d);
  const std::vector<double> y = table.column(args.target);
  const std::size_t n = table.rows;

  // Fold assignment: seeded shuffle, or leave-group-out on a group column.
  std::vector<std::size_t> fold_of(n);
  std::size_t fold_count = args.folds;
  if (args.group_column.empty()) {
    check(mccqr_kfold_assign(n, args.folds, args.seed, fold_of.data()));
  } else {
    const std::vector<double> group = table.column(args.group_column);
    std::vector<double> values = group;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    fold_count = values.size();
    if (fold_count < 2) data_error("group column has fewer than two distinct values");
    for (std::size_t i = 0; i < n; ++i) {
      fold_of[i] = static_cast<std::size_t>(
          std::lower_bound(values.begin(), values.end(), group[i]) - values.begin());
    }
  }

  const std::vector<std::string> models = split_list(args.models);
  for (const auto& name : models) {
    if (name != "mccqr" && name != "ann" && name != "lasso") {
      usage_error("--models entries must be mccqr, ann or lasso (got '" + name + "')");
    }
  }

  std::string fold_csv = "model,fold,n_test,mae\n";
  std::vector<std::vector<double>> per_model_mae(models.size());

  for (std::size_t fold = 0; fold < fold_count; ++fold) {
    std::vector<double> x_train, y_train, x_test, y_test;
    for (std::size_t i = 0; i < n; ++i) {
      auto& xs = fold_of[i] == fold ? x_test : x_train;
      auto& ys = fold_of[i] == fold ? y_test : y_train;
      xs.insert(xs.end(), x.begin() + i * d, x.begin() + (i + 1) * d);
      ys.push_back(y[i]);
    }
    if (y_train.size() < args.config.batch_size || y_test.empty()) {
      data_error("fold " + std::to_string(fold) + " leaves too little data (" +
                 std::to_string(y_train.size()) + " train, " + std::to_string(y_test.size()) +
                 " test)");
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
      mccqr_train_config config = args.config;
      config.seed = args.seed * 1000 + fold;  // per-fold stream, still seeded
      mccqr_model* raw = nullptr;
      if (models[m] == "mccqr") {
        check(mccqr_train(x_train.data(), y_train.size(), d, y_train.data(), &config, &raw));
      } else if (models[m] == "ann") {
        check(mccqr_ann_train(x_train.data(), y_train.size(), d, y_train.data(), &config,
                              &raw));
      } else {
        check(mccqr_lasso_train(x_train.data(), y_train.size(), d, y_train.data(),
                                args.lambda, 1000, 1e-7, &raw));
      }
      const ModelHandle model(raw);
      std::vector<double> pred(y_test.size());
      check(mccqr_point_predict(raw, x_test.data(), y_test.size(), d, args.draws,
                                config.seed + 1, args.threads, pred.data()));
      double mae = 0.0;
      check(mccqr_median_abs_error(y_test.data(), pred.data(), y_test.size(), &mae));
      per_model_mae[m].push_back(mae);
      fold_csv += models[m] + "," + std::to_string(fold) + "," +
                  std::to_string(y_test.size()) + "," + fmt(mae) + "\n";
      std::cerr << "fold " << fold << " " << models[m] << " mae " << fmt(mae) << "\n";
    }
  }

  if (!args.out.empty()) write_file(args.out, fold_csv);

  std::cout << "model   mae_median_mean  mae_median_std  folds\n";
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& maes = per_model_mae[m];
    double mean = 0.0;
    for (double v : maes) mean += v;
    mean /= static_cast<double>(maes.size());
    double var = 0.0;
    for (double v : maes) var += (v - mean) * (v - mean);
    var /= static_cast<double>(maes.size());
    char line[128];
    std::snprintf(line, sizeof(line), "%-7s %15.4f %15.4f %6zu\n", models[m].c_str(), mean,
                  std::sqrt(var), maes.size());
    std::cout << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo-dropout composite quantile regression toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate synthetic data with known conditional quantiles");
  synth_cmd->add_option("--family", synth.family,
                        "linear-hetero | sine-hetero | age-like");
  synth_cmd->add_option("--n", synth.n, "samples")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--d", synth.d, "feature count (0 = family default)");
  synth_cmd->add_option("--noise-scale", synth.noise_scale, "noise multiplier");
  synth_cmd->add_option("--seed", synth.seed, "rng seed");
  synth_cmd->add_option("--out-prefix", synth.out_prefix, "output path prefix")->required();

  TrainArgs train;
  mccqr_train_config_defaults(&train.config);
  auto* train_cmd = app.add_subcommand("train", "Train an MCCQR model");
  train_cmd->add_option("--data", train.data, "training csv")->required();
  train_cmd->add_option("--target", train.target, "target column name");
  train_cmd->add_option("--epochs", train.config.epochs)->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.config.learning_rate);
  train_cmd->add_option("--batch", train.config.batch_size)->check(CLI::PositiveNumber);
  train_cmd->add_option("--dropout", train.config.dropout_rate);
  train_cmd->add_option("--quantiles", train.config.quantiles)->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden", train.config.hidden_units)->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train.config.seed);
  train_cmd->add_option("--model-out", train.model_out, "model json path")->required();

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Monte-Carlo predictive distributions");
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--data", predict.data)->required();
  predict_cmd->add_option("--target", predict.target, "target column to drop if present");
  predict_cmd->add_option("--draws", predict.draws)->check(CLI::PositiveNumber);
  predict_cmd->add_option("--mode", predict.mode, "full | aleatory | epistemic");
  predict_cmd->add_option("--seed", predict.seed);
  predict_cmd->add_option("--levels", predict.levels,
                          "comma list of interval levels to emit, e.g. 0.5,0.9");
  predict_cmd->add_option("--threads", predict.threads);
  predict_cmd->add_option("--out", predict.out, "output csv")->required();

  PicpArgs picp;
  auto* picp_cmd = app.add_subcommand("picp", "Prediction-interval coverage report");
  picp_cmd->add_option("--pred", picp.pred, "predict output csv")->required();
  picp_cmd->add_option("--truth", picp.truth, "csv with the true targets")->required();
  picp_cmd->add_option("--target", picp.target, "target column in the truth file");
  picp_cmd->add_option("--levels", picp.levels, "levels to evaluate (default: all present)");
  picp_cmd->add_option("--out", picp.out, "report csv path (default stdout)");
  picp_cmd->add_option("--svg", picp.svg, "write a PICP-vs-level plot");
  picp_cmd->add_flag("--table", picp.table, "plain-text table instead of csv");

  AssocArgs assoc;
  auto* assoc_cmd =
      app.add_subcommand("assoc", "Association tests on raw and corrected gaps");
  assoc_cmd->add_option("--gaps", assoc.gaps, "csv: y_true,y_pred,sigma,covariates...")
      ->required();
  assoc_cmd->add_option("--predictor", assoc.predictor)->required();
  assoc_cmd->add_option("--covariates", assoc.covariates, "comma list of covariate columns");
  assoc_cmd->add_option("--response", assoc.response, "bag | bagc | both");
  assoc_cmd->add_option("--out", assoc.out, "json path (default stdout)");

  OccludeArgs occlude;
  auto* occlude_cmd = app.add_subcommand("occlude", "Occlusion-sensitivity mapping");
  occlude_cmd->add_option("--model", occlude.model)->required();
  occlude_cmd->add_option("--data", occlude.data)->required();
  occlude_cmd->add_option("--atlas", occlude.atlas, "csv: region_name,feature_index")
      ->required();
  occlude_cmd->add_option("--target", occlude.target, "target column (used as age)");
  occlude_cmd->add_option("--covariates", occlude.covariates,
                          "extra covariate columns, excluded from features");
  occlude_cmd->add_option("--draws", occlude.draws)->check(CLI::PositiveNumber);
  occlude_cmd->add_option("--seed", occlude.seed);
  occlude_cmd->add_option("--threads", occlude.threads);
  occlude_cmd->add_option("--out", occlude.out, "long-format csv path")->required();
  occlude_cmd->add_option("--summary-out", occlude.summary_out,
                          "fit summary json (default stdout)");

  BenchArgs bench;
  mccqr_train_config_defaults(&bench.config);
  auto* bench_cmd = app.add_subcommand("bench", "Cross-validated model comparison");
  bench_cmd->add_option("--data", bench.data)->required();
  bench_cmd->add_option("--target", bench.target);
  bench_cmd->add_option("--models", bench.models, "comma list: mccqr,ann,lasso");
  bench_cmd->add_option("--folds", bench.folds)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--group-column", bench.group_column,
                        "leave-group-out instead of k-fold");
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_option("--draws", bench.draws, "draws per mccqr point prediction");
  bench_cmd->add_option("--lambda", bench.lambda, "lasso penalty");
  bench_cmd->add_option("--threads", bench.threads);
  bench_cmd->add_option("--epochs", bench.config.epochs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--lr", bench.config.learning_rate);
  bench_cmd->add_option("--batch", bench.config.batch_size)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dropout", bench.config.dropout_rate);
  bench_cmd->add_option("--quantiles", bench.config.quantiles)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench.out, "per-fold csv path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (train_cmd->parsed()) return run_train(train);
    if (predict_cmd->parsed()) return run_predict(predict);
    if (picp_cmd->parsed()) return run_picp(picp);
    if (assoc_cmd->parsed()) return run_assoc(assoc);
    if (occlude_cmd->parsed()) return run_occlude(occlude);
    if (bench_cmd->parsed()) return run_bench(bench);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
