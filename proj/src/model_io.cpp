#include "mccqr/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace mccqr {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw DataError(std::string("model file: ") + name + " is not a nested array");
  }
  Matrix m(j.size(), j[0].size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (j[r].size() != m.cols()) {
      throw DataError(std::string("model file: ragged rows in ") + name);
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json standardizer_to_json(const Standardizer& s) {
  return json{{"means", s.means},
              {"stds", s.stds},
              {"dropped_columns", s.dropped_columns}};
}

Standardizer standardizer_from_json(const json& j, std::size_t raw_dim) {
  Standardizer s;
  s.means = j.at("means").get<Vector>();
  s.stds = j.at("stds").get<Vector>();
  s.dropped_columns = j.at("dropped_columns").get<std::vector<std::size_t>>();
  s.raw_dim = raw_dim;
  if (s.means.size() != s.stds.size() ||
      s.means.size() + s.dropped_columns.size() != raw_dim) {
    throw DataError("model file: inconsistent standardization block");
  }
  for (double sd : s.stds) {
    if (!(sd > 0.0)) throw DataError("model file: standardization std must be > 0");
  }
  return s;
}

json train_meta_to_json(const TrainConfig& c, const Vector& loss_trace) {
  return json{{"seed", c.seed},
              {"epochs", c.epochs},
              {"lr", c.learning_rate},
              {"batch", c.batch_size},
              {"loss_trace", loss_trace}};
}

void train_meta_from_json(const json& j, TrainConfig& c, Vector& loss_trace) {
  c.seed = j.at("seed").get<std::uint64_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("lr").get<double>();
  c.batch_size = j.at("batch").get<std::size_t>();
  loss_trace = j.at("loss_trace").get<Vector>();
}

json network_to_json(const NetworkParams& p, const TrainConfig& c, const Standardizer& s,
                     const Vector& loss_trace, const char* type, const Vector& taus) {
  return json{{"format_version", kModelFormatVersion},
              {"model_type", type},
              {"d", s.raw_dim},
              {"H", p.hidden_units()},
              {"K", p.outputs()},
              {"taus", taus},
              {"dropout_rate", c.dropout_rate},
              {"standardization", standardizer_to_json(s)},
              {"W1", matrix_to_json(p.w1)},
              {"b1", p.b1},
              {"W2", matrix_to_json(p.w2)},
              {"b2", p.b2},
              {"train_meta", train_meta_to_json(c, loss_trace)}};
}

void network_from_json(const json& j, NetworkParams& p, TrainConfig& c, Standardizer& s,
                       Vector& loss_trace) {
  p.w1 = matrix_from_json(j.at("W1"), "W1");
  p.b1 = j.at("b1").get<Vector>();
  p.w2 = matrix_from_json(j.at("W2"), "W2");
  p.b2 = j.at("b2").get<Vector>();
  if (p.b1.size() != p.w1.cols() || p.w2.rows() != p.w1.cols() ||
      p.b2.size() != p.w2.cols()) {
    throw DataError("model file: parameter shapes are inconsistent");
  }
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.hidden_units = j.at("H").get<std::size_t>();
  c.quantile_count = j.at("K").get<std::size_t>();
  s = standardizer_from_json(j.at("standardization"), j.at("d").get<std::size_t>());
  train_meta_from_json(j.at("train_meta"), c, loss_trace);
}

json parse_document(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("model file: not valid JSON");
  const int version = j.value("format_version", -1);
  if (version != kModelFormatVersion) {
    throw DataError("model file: unsupported format_version " + std::to_string(version));
  }
  return j;
}

}  // namespace

std::size_t LoadedModel::raw_input_dim() const {
  switch (kind) {
    case ModelKind::Mccqr: return mccqr->raw_input_dim();
    case ModelKind::Ann: return ann->raw_input_dim();
    case ModelKind::Lasso: return lasso->standardizer.raw_dim;
  }
  throw InvalidArgument("LoadedModel: unknown kind");
}

std::string model_to_json(const MccqrModel& model) {
  json j = network_to_json(model.params(), model.config(), model.standardizer(),
                           model.loss_trace(), "mccqr", model.grid().taus());
  return j.dump(2) + "\n";
}

std::string model_to_json(const AnnModel& model) {
  json j = network_to_json(model.params(), model.config(), model.standardizer(),
                           model.loss_trace(), "ann", Vector{0.5});
  return j.dump(2) + "\n";
}

std::string model_to_json(const LassoModel& model) {
  json j{{"format_version", kModelFormatVersion},
         {"model_type", "lasso"},
         {"d", model.standardizer.raw_dim},
         {"lambda", model.lambda},
         {"coefficients", model.coefficients},
         {"intercept", model.intercept},
         {"sweeps", model.sweeps},
         {"standardization", standardizer_to_json(model.standardizer)}};
  return j.dump(2) + "\n";
}

std::string model_to_json(const LoadedModel& model) {
  switch (model.kind) {
    case ModelKind::Mccqr: return model_to_json(*model.mccqr);
    case ModelKind::Ann: return model_to_json(*model.ann);
    case ModelKind::Lasso: return model_to_json(*model.lasso);
  }
  throw InvalidArgument("LoadedModel: unknown kind");
}

LoadedModel model_from_json(const std::string& text) {
  const json j = parse_document(text);
  const std::string type = j.value("model_type", "");
  LoadedModel loaded;
  if (type == "mccqr") {
    NetworkParams params;
    TrainConfig config;
    Standardizer standardizer;
    Vector trace;
    network_from_json(j, params, config, standardizer, trace);
    QuantileGrid grid(j.at("taus").get<Vector>());
    loaded.kind = ModelKind::Mccqr;
    loaded.mccqr.emplace(std::move(params), std::move(grid), config, std::move(standardizer),
                         std::move(trace));
  } else if (type == "ann") {
    NetworkParams params;
    TrainConfig config;
    Standardizer standardizer;
    Vector trace;
    network_from_json(j, params, config, standardizer, trace);
    loaded.kind = ModelKind::Ann;
    loaded.ann.emplace(std::move(params), config, std::move(standardizer), std::move(trace));
  } else if (type == "lasso") {
    LassoModel model;
    model.lambda = j.at("lambda").get<double>();
    model.coefficients = j.at("coefficients").get<Vector>();
    model.intercept = j.at("intercept").get<double>();
    model.sweeps = j.value("sweeps", std::size_t{0});
    model.standardizer =
        standardizer_from_json(j.at("standardization"), j.at("d").get<std::size_t>());
    if (model.coefficients.size() != model.standardizer.kept_dim()) {
      throw DataError("model file: coefficient count does not match standardization");
    }
    loaded.kind = ModelKind::Lasso;
    loaded.lasso = std::move(model);
  } else {
    throw DataError("model file: unknown model_type '" + type + "'");
  }
  return loaded;
}

void save_model(const LoadedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_model(const MccqrModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_model(const AnnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_model(const LassoModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << model_to_json(model);
  if (!out) throw IoError("failed writing '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace mccqr
