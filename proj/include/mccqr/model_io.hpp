#pragma once

#include <optional>
#include <string>

#include "mccqr/lasso.hpp"
#include "mccqr/model.hpp"

namespace mccqr {

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { Mccqr, Ann, Lasso };

// Tagged holder for any model the tools can load; exactly one member is set.
struct LoadedModel {
  ModelKind kind = ModelKind::Mccqr;
  std::optional<MccqrModel> mccqr;
  std::optional<AnnModel> ann;
  std::optional<LassoModel> lasso;

  std::size_t raw_input_dim() const;
};

// Versioned JSON documents; 64-bit floats are emitted in shortest
// round-trip form, so save/load is lossless.
std::string model_to_json(const MccqrModel& model);
std::string model_to_json(const AnnModel& model);
std::string model_to_json(const LassoModel& model);
std::string model_to_json(const LoadedModel& model);

LoadedModel model_from_json(const std::string& text);

void save_model(const LoadedModel& model, const std::string& path);
void save_model(const MccqrModel& model, const std::string& path);
void save_model(const AnnModel& model, const std::string& path);
void save_model(const LassoModel& model, const std::string& path);
LoadedModel load_model(const std::string& path);

}  // namespace mccqr
