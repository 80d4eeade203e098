#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mccqr/network.hpp"

namespace mccqr {

// Trained MCCQR network. Immutable once built; the shareable artifact holds
// parameters, quantile grid, training configuration, standardization stats
// and the loss trace -- never training samples.
class MccqrModel {
 public:
  MccqrModel(NetworkParams params, QuantileGrid grid, TrainConfig config,
             Standardizer standardizer, Vector loss_trace);

  const NetworkParams& params() const { return params_; }
  const QuantileGrid& grid() const { return grid_; }
  const TrainConfig& config() const { return config_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Vector& loss_trace() const { return loss_trace_; }

  // Raw feature count expected at prediction time (before column drops).
  std::size_t raw_input_dim() const { return standardizer_.raw_dim; }
  std::size_t parameter_count() const { return params_.parameter_count(); }

 private:
  NetworkParams params_;
  QuantileGrid grid_;
  TrainConfig config_;
  Standardizer standardizer_;
  Vector loss_trace_;
};

MccqrModel train_mccqr(const Matrix& x, const Vector& y, const TrainConfig& config,
                       std::vector<std::string>* warnings = nullptr);

// Same architecture and hyperparameters, single head, mean-absolute-error
// objective, dropout during training only.
class AnnModel {
 public:
  AnnModel(NetworkParams params, TrainConfig config, Standardizer standardizer,
           Vector loss_trace);

  const NetworkParams& params() const { return params_; }
  const TrainConfig& config() const { return config_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Vector& loss_trace() const { return loss_trace_; }
  std::size_t raw_input_dim() const { return standardizer_.raw_dim; }

  // Deterministic maskless forward pass.
  double predict(std::span<const double> raw) const;

 private:
  NetworkParams params_;
  TrainConfig config_;
  Standardizer standardizer_;
  Vector loss_trace_;
};

AnnModel train_ann(const Matrix& x, const Vector& y, const TrainConfig& config,
                   std::vector<std::string>* warnings = nullptr);

}  // namespace mccqr
