#pragma once

// Shared hand-built model constructions for the occlusion and acceptance
// suites.

#include <cmath>
#include <numbers>

#include "mccqr/model.hpp"
#include "mccqr/stats.hpp"

namespace harness {

inline mccqr::Standardizer standardizer_with(mccqr::Vector means, std::size_t d) {
  mccqr::Standardizer s;
  s.raw_dim = d;
  s.means = std::move(means);
  s.stds = mccqr::Vector(d, 1.0);
  return s;
}

// Single hidden unit kept in its linear regime; head k is
//   h(x) + sigma_a * Phi^-1(tau_k)
// with h(x) = sum_j w_j * (x_j - mean_j) + bias. Dropout rate is zero so the
// only prediction randomness is the tau draw.
inline mccqr::MccqrModel planted_linear_model(const mccqr::Vector& weights,
                                              const mccqr::Vector& means, double sigma_a,
                                              std::size_t quantiles, double bias = 10.0) {
  const std::size_t d = weights.size();
  mccqr::NetworkParams p;
  p.w1 = mccqr::Matrix(d, 1);
  for (std::size_t j = 0; j < d; ++j) p.w1(j, 0) = weights[j];
  p.b1 = mccqr::Vector{bias};
  p.w2 = mccqr::Matrix(1, quantiles, 1.0);
  p.b2 = mccqr::Vector(quantiles);
  const mccqr::QuantileGrid grid = mccqr::QuantileGrid::equally_spaced(quantiles);
  for (std::size_t k = 0; k < quantiles; ++k) {
    p.b2[k] = sigma_a * mccqr::normal_quantile(grid.tau(k)) - bias;
  }
  mccqr::TrainConfig config;
  config.dropout_rate = 0.0;
  config.quantile_count = quantiles;
  config.hidden_units = 1;
  return mccqr::MccqrModel(std::move(p), grid, config, standardizer_with(means, d), {});
}

// Population std of Phi^-1(U) clamped to the grid edges [-c, c]; the
// continuum limit of the predictive std of planted_linear_model at
// sigma_a = 1.
inline double clamped_normal_std(std::size_t quantiles) {
  const double c =
      mccqr::normal_quantile(static_cast<double>(quantiles) / (quantiles + 1.0));
  const double phi_c = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
  const double q_c = 1.0 - mccqr::normal_cdf(c);
  const double second_moment = 1.0 - 2.0 * c * phi_c - 2.0 * q_c + 2.0 * c * c * q_c;
  return std::sqrt(second_moment);
}

}  // namespace harness
