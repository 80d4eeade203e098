#pragma once

#include "mccqr/model.hpp"

namespace mccqr {

// Which uncertainty sources are active during Monte-Carlo prediction.
//   Full:          random tau and dropout
//   AleatoryOnly:  random tau, dropout off
//   EpistemicOnly: tau fixed at 0.5, dropout on
enum class UncertaintyMode { Full, AleatoryOnly, EpistemicOnly };

struct PredictiveDistribution {
  Vector draws;
  double median = 0.0;     // empirical median of draws
  double std_dev = 0.0;    // population std of draws
};

// Piecewise-linear interpolation of (tau_k, heads_k); tau outside
// [tau_1, tau_K] clamps to the end value. Requires at least two knots.
double interpolate_quantile(std::span<const double> heads, const QuantileGrid& grid,
                            double tau);

// T stochastic forward passes. Per draw: tau is sampled (or fixed per mode),
// then a fresh dropout mask when the mode uses dropout. x is in raw feature
// space; standardization is applied internally.
PredictiveDistribution predict_distribution(const MccqrModel& model,
                                            std::span<const double> x, std::size_t t_draws,
                                            UncertaintyMode mode, Rng& rng);

// Per-sample predict_distribution with one split rng stream per row (stream i
// belongs to row position i). threads > 1 evaluates rows in parallel with
// identical results.
std::vector<PredictiveDistribution> predict_batch(const MccqrModel& model, const Matrix& x,
                                                  std::size_t t_draws, UncertaintyMode mode,
                                                  Rng& rng, unsigned threads = 1);

// Deterministic maskless head values for one raw-space input.
Vector forward_heads(const MccqrModel& model, std::span<const double> x);

}  // namespace mccqr
