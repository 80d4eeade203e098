#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mccqr/linalg.hpp"
#include "mccqr/quantile_loss.hpp"
#include "mccqr/rng.hpp"

namespace mccqr {

struct TrainConfig {
  std::size_t epochs = 10;
  double learning_rate = 0.01;
  std::size_t batch_size = 64;
  double dropout_rate = 0.2;
  std::size_t quantile_count = 101;
  std::size_t hidden_units = 32;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

// One hidden ReLU layer with a shared trunk and one output head per quantile.
struct NetworkParams {
  Matrix w1;  // input_dim x hidden
  Vector b1;  // hidden
  Matrix w2;  // hidden x outputs
  Vector b2;  // outputs

  std::size_t input_dim() const { return w1.rows(); }
  std::size_t hidden_units() const { return w1.cols(); }
  std::size_t outputs() const { return w2.cols(); }
  std::size_t parameter_count() const {
    return w1.rows() * w1.cols() + b1.size() + w2.rows() * w2.cols() + b2.size();
  }
};

// Hidden weights He-uniform (bound sqrt(6/input_dim), consumed row-major from
// rng); head weights and all biases start at zero.
NetworkParams init_params(std::size_t input_dim, std::size_t hidden, std::size_t outputs,
                          Rng& rng);

// Per-sample activations kept for backprop.
struct ForwardTrace {
  Vector pre_hidden;  // w1^T x + b1
  Vector hidden;      // after ReLU and, when a mask is given, mask/(1-p) scaling
  Vector heads;       // w2^T hidden + b2
};

// Empty mask means no dropout. A non-empty mask must have one {0,1} entry per
// hidden unit; inverted-dropout scaling by 1/(1-dropout_rate) is applied here.
ForwardTrace forward_trace(const NetworkParams& params, std::span<const double> x,
                           std::span<const double> mask, double dropout_rate);
Vector forward(const NetworkParams& params, std::span<const double> x,
               std::span<const double> mask = {}, double dropout_rate = 0.0);

struct Gradients {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;

  static Gradients zeros_like(const NetworkParams& params);
  void scale(double s);
};

// Exact gradient of the single-sample composite quantile loss
// (1/K) sum_k tilted_loss(y - heads_k, tau_k) w.r.t. every parameter,
// respecting the dropout mask used in the forward pass.
Gradients backprop(const NetworkParams& params, std::span<const double> x,
                   std::span<const double> mask, double dropout_rate, double y,
                   const QuantileGrid& grid);

// Shared backward pass: accumulates into acc given d(loss)/d(heads).
void backprop_from_head_grad(const NetworkParams& params, std::span<const double> x,
                             std::span<const double> mask, double dropout_rate,
                             const ForwardTrace& trace,
                             std::span<const double> dloss_dheads, Gradients& acc);

struct AdamState {
  Gradients m;
  Gradients v;
  std::size_t step = 0;

  static AdamState zeros_like(const NetworkParams& params);
};

// Standard Adam update with bias correction; increments state.step.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

// Per-feature standardization fitted on training data. Zero-variance columns
// are removed and recorded by their original index.
struct Standardizer {
  Vector means;                              // kept columns
  Vector stds;                               // kept columns, all > 0
  std::vector<std::size_t> dropped_columns;  // original indices, ascending
  std::size_t raw_dim = 0;

  static Standardizer fit(const Matrix& x);

  std::size_t kept_dim() const { return means.size(); }
  void apply(std::span<const double> raw, std::span<double> out) const;
  Vector apply(std::span<const double> raw) const;
  Matrix apply(const Matrix& x) const;
};

enum class TrainLoss { CompositeQuantile, MeanAbsolute };

struct FittedNetwork {
  NetworkParams params;
  Standardizer standardizer;
  Vector loss_trace;  // per-epoch mean training loss
};

// Mini-batch Adam on the chosen objective with a fresh dropout mask per
// sample per forward pass and a seeded shuffle each epoch. MeanAbsolute
// ignores quantile_count and fits a single head.
FittedNetwork train_network(const Matrix& x, const Vector& y, const TrainConfig& config,
                            TrainLoss loss, std::vector<std::string>* warnings = nullptr);

}  // namespace mccqr
