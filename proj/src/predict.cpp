#include "mccqr/predict.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace mccqr {

double interpolate_quantile(std::span<const double> heads, const QuantileGrid& grid,
                            double tau) {
  if (grid.size() < 2) {
    throw InvalidArgument("interpolate_quantile: need at least two quantile knots");
  }
  if (heads.size() != grid.size()) {
    throw InvalidArgument("interpolate_quantile: head count does not match grid");
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("interpolate_quantile: tau must lie in (0, 1)");
  }
  const Vector& taus = grid.taus();
  if (tau <= taus.front()) return heads.front();
  if (tau >= taus.back()) return heads.back();
  // First knot strictly above tau; its predecessor exists by the checks above.
  const auto it = std::upper_bound(taus.begin(), taus.end(), tau);
  const std::size_t hi = static_cast<std::size_t>(it - taus.begin());
  const std::size_t lo = hi - 1;
  const double w = (tau - taus[lo]) / (taus[hi] - taus[lo]);
  return heads[lo] + w * (heads[hi] - heads[lo]);
}

PredictiveDistribution predict_distribution(const MccqrModel& model,
                                            std::span<const double> x, std::size_t t_draws,
                                            UncertaintyMode mode, Rng& rng) {
  if (t_draws < 1) throw InvalidArgument("predict: need at least one draw");
  if (x.size() != model.raw_input_dim()) {
    throw InvalidArgument("predict: input has " + std::to_string(x.size()) +
                          " features, model expects " +
                          std::to_string(model.raw_input_dim()));
  }
  const Vector xs = model.standardizer().apply(x);
  const double dropout_rate = model.config().dropout_rate;
  const bool use_dropout = mode != UncertaintyMode::AleatoryOnly;
  const bool random_tau = mode != UncertaintyMode::EpistemicOnly;

  PredictiveDistribution dist;
  dist.draws.resize(t_draws);
  Vector mask(model.params().hidden_units());
  for (std::size_t t = 0; t < t_draws; ++t) {
    double tau = 0.5;
    if (random_tau) {
      // uniform() can return exactly 0; interpolation clamps at the grid
      // edges, so nudge into (0, 1).
      tau = std::max(rng.uniform(), 1e-300);
    }
    std::span<const double> mask_span;
    if (use_dropout) {
      rng.fill_bernoulli_mask(mask, dropout_rate);
      mask_span = mask;
    }
    const Vector heads = forward(model.params(), xs, mask_span, dropout_rate);
    dist.draws[t] = interpolate_quantile(heads, model.grid(), tau);
  }

  Vector sorted = dist.draws;
  std::sort(sorted.begin(), sorted.end());
  dist.median = median_sorted(sorted);
  dist.std_dev = population_std(dist.draws);
  return dist;
}

std::vector<PredictiveDistribution> predict_batch(const MccqrModel& model, const Matrix& x,
                                                  std::size_t t_draws, UncertaintyMode mode,
                                                  Rng& rng, unsigned threads) {
  if (x.rows() == 0) return {};
  std::vector<Rng> streams = rng.split(x.rows());
  std::vector<PredictiveDistribution> out(x.rows());

  const unsigned worker_count =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(x.rows())));
  if (worker_count == 1) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      out[i] = predict_distribution(model, x.row(i), t_draws, mode, streams[i]);
    }
    return out;
  }

  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < x.rows(); i += worker_count) {
        out[i] = predict_distribution(model, x.row(i), t_draws, mode, streams[i]);
      }
    });
  }
  for (auto& t : workers) t.join();
  return out;
}

Vector forward_heads(const MccqrModel& model, std::span<const double> x) {
  if (x.size() != model.raw_input_dim()) {
    throw InvalidArgument("forward_heads: input has " + std::to_string(x.size()) +
                          " features, model expects " +
                          std::to_string(model.raw_input_dim()));
  }
  return forward(model.params(), model.standardizer().apply(x));
}

}  // namespace mccqr
