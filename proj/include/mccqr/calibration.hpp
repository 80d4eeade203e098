#pragma once

#include <limits>
#include <string>

#include "mccqr/predict.hpp"

namespace mccqr {

struct CalibrationReport {
  Vector levels;         // nominal central coverage, strictly increasing
  Vector picp;           // empirical coverage per level
  std::size_t n = 0;     // samples evaluated
  double crossing_rate = std::numeric_limits<double>::quiet_NaN();
  double mae_median = std::numeric_limits<double>::quiet_NaN();
};

// Type-7 empirical quantile (linear interpolation of order statistics) of an
// ascending-sorted sample.
double empirical_quantile_sorted(std::span<const double> sorted, double p);

// Fraction of samples whose y falls inside the central interval
// [q_{(1-level)/2}, q_{(1+level)/2}] of that sample's draws, bounds inclusive.
double picp(const std::vector<PredictiveDistribution>& dists, const Vector& y, double level);

// PICP at each level plus median absolute error of the point predictions.
// crossing_rate is copied into the report when supplied (it needs a model,
// see crossing_rate below).
CalibrationReport picp_curve(const std::vector<PredictiveDistribution>& dists,
                             const Vector& y, const Vector& levels,
                             double crossing = std::numeric_limits<double>::quiet_NaN());

// 0.05, 0.10, ..., 0.95.
Vector default_levels();

// Fraction of adjacent head pairs with heads[k+1] < heads[k] - 1e-12 over
// deterministic maskless forward passes on every row of x.
double crossing_rate(const MccqrModel& model, const Matrix& x);

double median_abs_error(const Vector& y_true, const Vector& y_pred);

// Coverage of precomputed interval bounds, inclusive.
double interval_coverage(const Vector& y, const Vector& lo, const Vector& hi);

// Subgroup error summary; `ratio` is mae divided by the subgroup's target
// standard deviation (our reading of a standardized MAE).
struct GroupMae {
  double group = 0.0;
  std::size_t n = 0;
  double mae_median = 0.0;
  double mae_std_ratio = 0.0;
};
std::vector<GroupMae> mae_by_group(const Vector& y_true, const Vector& y_pred,
                                   const Vector& group);

// level,picp rows; shortest round-trip formatting, lossless to re-parse.
std::string calibration_csv(const CalibrationReport& report);
CalibrationReport calibration_from_csv(const std::string& text);
std::string calibration_table(const CalibrationReport& report);
// PICP-vs-level line plot with the identity reference line.
std::string calibration_svg(const CalibrationReport& report);

}  // namespace mccqr
