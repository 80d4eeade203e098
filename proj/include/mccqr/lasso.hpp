#pragma once

#include <span>
#include <string>
#include <vector>

#include "mccqr/network.hpp"

namespace mccqr {

struct LassoModel {
  Vector coefficients;  // one per kept (standardized) column
  double intercept = 0.0;
  double lambda = 1.0;
  Standardizer standardizer;
  std::size_t sweeps = 0;  // coordinate-descent sweeps actually run

  double predict(std::span<const double> raw) const;
};

// Cyclic coordinate descent with soft-thresholding on the objective
//   (1/(2N)) * ||y - X beta||^2 + lambda * ||beta||_1
// for the design exactly as given (no intercept, no standardization).
// Stops when the largest coefficient change in a sweep is below tol.
// objective_trace, when non-null, records the objective after every sweep.
Vector lasso_coordinate_descent(const Matrix& x, const Vector& y, double lambda,
                                std::size_t max_iters, double tol,
                                std::vector<double>* objective_trace = nullptr,
                                std::size_t* sweeps_used = nullptr);

// Standardizes features, centers the target through an intercept, then runs
// coordinate descent. Defaults follow lambda=1.0 on standardized features.
LassoModel train_lasso(const Matrix& x, const Vector& y, double lambda = 1.0,
                       std::size_t max_iters = 1000, double tol = 1e-7,
                       std::vector<std::string>* warnings = nullptr);

}  // namespace mccqr
