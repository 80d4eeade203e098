#include "mccqr/model.hpp"

namespace mccqr {

MccqrModel::MccqrModel(NetworkParams params, QuantileGrid grid, TrainConfig config,
                       Standardizer standardizer, Vector loss_trace)
    : params_(std::move(params)),
      grid_(std::move(grid)),
      config_(config),
      standardizer_(std::move(standardizer)),
      loss_trace_(std::move(loss_trace)) {
  if (params_.outputs() != grid_.size()) {
    throw InvalidArgument("MccqrModel: head count does not match quantile grid");
  }
  if (params_.input_dim() != standardizer_.kept_dim()) {
    throw InvalidArgument("MccqrModel: input width does not match standardizer");
  }
}

MccqrModel train_mccqr(const Matrix& x, const Vector& y, const TrainConfig& config,
                       std::vector<std::string>* warnings) {
  FittedNetwork fitted = train_network(x, y, config, TrainLoss::CompositeQuantile, warnings);
  return MccqrModel(std::move(fitted.params), QuantileGrid::equally_spaced(config.quantile_count),
                    config, std::move(fitted.standardizer), std::move(fitted.loss_trace));
}

AnnModel::AnnModel(NetworkParams params, TrainConfig config, Standardizer standardizer,
                   Vector loss_trace)
    : params_(std::move(params)),
      config_(config),
      standardizer_(std::move(standardizer)),
      loss_trace_(std::move(loss_trace)) {
  if (params_.outputs() != 1) throw InvalidArgument("AnnModel: expects a single head");
  if (params_.input_dim() != standardizer_.kept_dim()) {
    throw InvalidArgument("AnnModel: input width does not match standardizer");
  }
}

double AnnModel::predict(std::span<const double> raw) const {
  const Vector xs = standardizer_.apply(raw);
  return forward(params_, xs)[0];
}

AnnModel train_ann(const Matrix& x, const Vector& y, const TrainConfig& config,
                   std::vector<std::string>* warnings) {
  FittedNetwork fitted = train_network(x, y, config, TrainLoss::MeanAbsolute, warnings);
  return AnnModel(std::move(fitted.params), config, std::move(fitted.standardizer),
                  std::move(fitted.loss_trace));
}

}  // namespace mccqr
