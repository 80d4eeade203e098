#include "mccqr/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mccqr {

namespace {

void check_input(const NetworkParams& params, std::span<const double> x,
                 std::span<const double> mask) {
  if (x.size() != params.input_dim()) {
    throw InvalidArgument("forward: input has " + std::to_string(x.size()) +
                          " features, network expects " +
                          std::to_string(params.input_dim()));
  }
  if (!mask.empty() && mask.size() != params.hidden_units()) {
    throw InvalidArgument("forward: mask has " + std::to_string(mask.size()) +
                          " entries, expected " + std::to_string(params.hidden_units()));
  }
}

void check_config(const TrainConfig& config) {
  if (config.epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
  if (config.batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0)) {
    throw InvalidArgument("train: dropout_rate must lie in [0, 1)");
  }
  if (!(config.learning_rate > 0.0)) {
    throw InvalidArgument("train: learning_rate must be positive");
  }
  if (config.hidden_units < 1) throw InvalidArgument("train: hidden_units must be >= 1");
}

}  // namespace

NetworkParams init_params(std::size_t input_dim, std::size_t hidden, std::size_t outputs,
                          Rng& rng) {
  if (input_dim < 1 || hidden < 1 || outputs < 1) {
    throw InvalidArgument("init_params: all dimensions must be >= 1");
  }
  NetworkParams params;
  params.w1 = Matrix(input_dim, hidden);
  params.b1 = Vector(hidden, 0.0);
  params.w2 = Matrix(hidden, outputs);
  params.b2 = Vector(outputs, 0.0);

  // Hidden layer He-uniform; the head layer starts at zero so the quantile
  // heads separate strictly through the tau-ordered loss gradients instead of
  // starting in a random order (hidden activations are nonnegative, so the
  // ordering of head gradients follows the taus).
  const double bound1 = std::sqrt(6.0 / static_cast<double>(input_dim));
  for (auto& w : params.w1.data()) w = (2.0 * rng.uniform() - 1.0) * bound1;
  return params;
}

ForwardTrace forward_trace(const NetworkParams& params, std::span<const double> x,
                           std::span<const double> mask, double dropout_rate) {
  check_input(params, x, mask);
  const std::size_t h = params.hidden_units();
  const std::size_t k = params.outputs();

  ForwardTrace trace;
  trace.pre_hidden.assign(params.b1.begin(), params.b1.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const auto w1row = params.w1.row(i);
    for (std::size_t j = 0; j < h; ++j) trace.pre_hidden[j] += xi * w1row[j];
  }

  trace.hidden.resize(h);
  const double keep_scale = mask.empty() ? 1.0 : 1.0 / (1.0 - dropout_rate);
  for (std::size_t j = 0; j < h; ++j) {
    double a = trace.pre_hidden[j] > 0.0 ? trace.pre_hidden[j] : 0.0;
    if (!mask.empty()) a *= mask[j] * keep_scale;
    trace.hidden[j] = a;
  }

  trace.heads.assign(params.b2.begin(), params.b2.end());
  for (std::size_t j = 0; j < h; ++j) {
    const double hj = trace.hidden[j];
    if (hj == 0.0) continue;
    const auto w2row = params.w2.row(j);
    for (std::size_t o = 0; o < k; ++o) trace.heads[o] += hj * w2row[o];
  }
  return trace;
}

Vector forward(const NetworkParams& params, std::span<const double> x,
               std::span<const double> mask, double dropout_rate) {
  return forward_trace(params, x, mask, dropout_rate).heads;
}

Gradients Gradients::zeros_like(const NetworkParams& params) {
  Gradients g;
  g.w1 = Matrix(params.w1.rows(), params.w1.cols());
  g.b1 = Vector(params.b1.size(), 0.0);
  g.w2 = Matrix(params.w2.rows(), params.w2.cols());
  g.b2 = Vector(params.b2.size(), 0.0);
  return g;
}

void Gradients::scale(double s) {
  for (auto& v : w1.data()) v *= s;
  for (auto& v : b1) v *= s;
  for (auto& v : w2.data()) v *= s;
  for (auto& v : b2) v *= s;
}

void backprop_from_head_grad(const NetworkParams& params, std::span<const double> x,
                             std::span<const double> mask, double dropout_rate,
                             const ForwardTrace& trace,
                             std::span<const double> dloss_dheads, Gradients& acc) {
  const std::size_t h = params.hidden_units();
  const std::size_t k = params.outputs();
  if (dloss_dheads.size() != k) {
    throw InvalidArgument("backprop: head gradient size mismatch");
  }

  for (std::size_t o = 0; o < k; ++o) acc.b2[o] += dloss_dheads[o];
  for (std::size_t j = 0; j < h; ++j) {
    const double hj = trace.hidden[j];
    if (hj != 0.0) {
      auto w2grow = acc.w2.row(j);
      for (std::size_t o = 0; o < k; ++o) w2grow[o] += hj * dloss_dheads[o];
    }
  }

  // d(loss)/d(pre_hidden): through the head weights, the dropout scaling and
  // the ReLU. Dropped units and inactive ReLUs contribute exactly zero.
  Vector dpre(h, 0.0);
  const double keep_scale = mask.empty() ? 1.0 : 1.0 / (1.0 - dropout_rate);
  for (std::size_t j = 0; j < h; ++j) {
    if (trace.pre_hidden[j] <= 0.0) continue;
    if (!mask.empty() && mask[j] == 0.0) continue;
    const auto w2row = params.w2.row(j);
    double g = 0.0;
    for (std::size_t o = 0; o < k; ++o) g += w2row[o] * dloss_dheads[o];
    if (!mask.empty()) g *= keep_scale;
    dpre[j] = g;
  }

  for (std::size_t j = 0; j < h; ++j) acc.b1[j] += dpre[j];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    auto w1grow = acc.w1.row(i);
    for (std::size_t j = 0; j < h; ++j) w1grow[j] += xi * dpre[j];
  }
}

Gradients backprop(const NetworkParams& params, std::span<const double> x,
                   std::span<const double> mask, double dropout_rate, double y,
                   const QuantileGrid& grid) {
  if (grid.size() != params.outputs()) {
    throw InvalidArgument("backprop: grid size does not match output heads");
  }
  const ForwardTrace trace = forward_trace(params, x, mask, dropout_rate);
  Vector dheads(grid.size());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t o = 0; o < grid.size(); ++o) {
    dheads[o] = -scale * tilted_loss_subgrad(y - trace.heads[o], grid.tau(o));
  }
  Gradients acc = Gradients::zeros_like(params);
  backprop_from_head_grad(params, x, mask, dropout_rate, trace, dheads, acc);
  return acc;
}

AdamState AdamState::zeros_like(const NetworkParams& params) {
  AdamState state;
  state.m = Gradients::zeros_like(params);
  state.v = Gradients::zeros_like(params);
  state.step = 0;
  return state;
}

namespace {

void adam_update_block(std::span<double> theta, std::span<const double> grad,
                       std::span<double> m, std::span<double> v, double lr_t, double beta1,
                       double beta2, double eps, double bias2) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    theta[i] -= lr_t * m[i] / (std::sqrt(v[i] / bias2) + eps);
  }
}

}  // namespace

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(config.adam_beta1, t);
  const double bias2 = 1.0 - std::pow(config.adam_beta2, t);
  const double lr_t = config.learning_rate / bias1;

  adam_update_block(params.w1.data(), grads.w1.data(), state.m.w1.data(), state.v.w1.data(),
                    lr_t, config.adam_beta1, config.adam_beta2, config.adam_eps, bias2);
  adam_update_block(params.b1, grads.b1, state.m.b1, state.v.b1, lr_t, config.adam_beta1,
                    config.adam_beta2, config.adam_eps, bias2);
  adam_update_block(params.w2.data(), grads.w2.data(), state.m.w2.data(), state.v.w2.data(),
                    lr_t, config.adam_beta1, config.adam_beta2, config.adam_eps, bias2);
  adam_update_block(params.b2, grads.b2, state.m.b2, state.v.b2, lr_t, config.adam_beta1,
                    config.adam_beta2, config.adam_eps, bias2);
}

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() == 0) throw InvalidArgument("Standardizer: no rows");
  Standardizer s;
  s.raw_dim = x.cols();
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
    m /= n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const double d = x(r, c) - m;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / n);
    if (sd < 1e-12) {
      s.dropped_columns.push_back(c);
    } else {
      s.means.push_back(m);
      s.stds.push_back(sd);
    }
  }
  if (s.kept_dim() == 0) {
    throw DataError("Standardizer: every feature column has zero variance");
  }
  return s;
}

void Standardizer::apply(std::span<const double> raw, std::span<double> out) const {
  if (raw.size() != raw_dim) {
    throw InvalidArgument("Standardizer: input has " + std::to_string(raw.size()) +
                          " features, expected " + std::to_string(raw_dim));
  }
  if (out.size() != kept_dim()) {
    throw InvalidArgument("Standardizer: output span size mismatch");
  }
  std::size_t next_drop = 0;
  std::size_t kept = 0;
  for (std::size_t c = 0; c < raw_dim; ++c) {
    if (next_drop < dropped_columns.size() && dropped_columns[next_drop] == c) {
      ++next_drop;
      continue;
    }
    out[kept] = (raw[c] - means[kept]) / stds[kept];
    ++kept;
  }
}

Vector Standardizer::apply(std::span<const double> raw) const {
  Vector out(kept_dim());
  apply(raw, out);
  return out;
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows(), kept_dim());
  for (std::size_t r = 0; r < x.rows(); ++r) apply(x.row(r), out.row(r));
  return out;
}

FittedNetwork train_network(const Matrix& x, const Vector& y, const TrainConfig& config,
                            TrainLoss loss, std::vector<std::string>* warnings) {
  check_config(config);
  const std::size_t n = x.rows();
  if (n == 0) throw InvalidArgument("train: empty training set");
  if (y.size() != n) {
    throw InvalidArgument("train: " + std::to_string(n) + " rows but " +
                          std::to_string(y.size()) + " targets");
  }
  if (n < config.batch_size) {
    throw InvalidArgument("train: need at least batch_size=" +
                          std::to_string(config.batch_size) + " samples, got " +
                          std::to_string(n));
  }
  if (!all_finite(x.data()) || !all_finite(y)) {
    throw DataError("train: non-finite values in training data");
  }
  if (population_std(y) < 1e-12 && warnings) {
    warnings->push_back("target is constant across the training set");
  }

  FittedNetwork fitted;
  fitted.standardizer = Standardizer::fit(x);
  if (warnings && !fitted.standardizer.dropped_columns.empty()) {
    warnings->push_back(std::to_string(fitted.standardizer.dropped_columns.size()) +
                        " zero-variance feature column(s) removed");
  }
  const Matrix xs = fitted.standardizer.apply(x);

  const std::size_t k = loss == TrainLoss::CompositeQuantile ? config.quantile_count : 1;
  const QuantileGrid grid = loss == TrainLoss::CompositeQuantile
                                ? QuantileGrid::equally_spaced(k)
                                : QuantileGrid(Vector{0.5});

  Rng rng(config.seed);
  fitted.params = init_params(fitted.standardizer.kept_dim(), config.hidden_units, k, rng);
  AdamState adam = AdamState::zeros_like(fitted.params);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Vector mask(fitted.params.hidden_units());
  Vector dheads(k);
  const double head_scale = 1.0 / static_cast<double>(k);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, n);
      const double batch_n = static_cast<double>(end - start);
      Gradients batch_grad = Gradients::zeros_like(fitted.params);

      for (std::size_t pos = start; pos < end; ++pos) {
        const std::size_t i = order[pos];
        rng.fill_bernoulli_mask(mask, config.dropout_rate);
        const ForwardTrace trace =
            forward_trace(fitted.params, xs.row(i), mask, config.dropout_rate);

        double sample_loss = 0.0;
        if (loss == TrainLoss::CompositeQuantile) {
          for (std::size_t o = 0; o < k; ++o) {
            const double eps = y[i] - trace.heads[o];
            sample_loss += tilted_loss(eps, grid.tau(o));
            dheads[o] = -head_scale * tilted_loss_subgrad(eps, grid.tau(o));
          }
          sample_loss *= head_scale;
        } else {
          const double eps = y[i] - trace.heads[0];
          sample_loss = std::fabs(eps);
          // L1 subgradient, 0 at eps = 0 so converged fits stay stationary.
          dheads[0] = eps > 0.0 ? -1.0 : (eps < 0.0 ? 1.0 : 0.0);
        }
        epoch_loss += sample_loss;
        backprop_from_head_grad(fitted.params, xs.row(i), mask, config.dropout_rate, trace,
                                dheads, batch_grad);
      }

      batch_grad.scale(1.0 / batch_n);
      adam_step(fitted.params, batch_grad, adam, config);
      if (!all_finite(fitted.params.w1.data()) || !all_finite(fitted.params.b1) ||
          !all_finite(fitted.params.w2.data()) || !all_finite(fitted.params.b2)) {
        throw NumericError("train: parameters became non-finite at epoch " +
                           std::to_string(epoch + 1) + ", batch " +
                           std::to_string(start / config.batch_size + 1));
      }
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      throw NumericError("train: loss became non-finite at epoch " +
                         std::to_string(epoch + 1));
    }
    fitted.loss_trace.push_back(epoch_loss);
  }
  return fitted;
}

}  // namespace mccqr
