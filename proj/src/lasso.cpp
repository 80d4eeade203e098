#include "mccqr/lasso.hpp"

#include <cmath>

namespace mccqr {

namespace {

double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

double lasso_objective(const Matrix& x, const Vector& y, const Vector& beta, double lambda,
                       const Vector& residual) {
  double rss = 0.0;
  for (double r : residual) rss += r * r;
  double l1 = 0.0;
  for (double b : beta) l1 += std::fabs(b);
  return rss / (2.0 * static_cast<double>(y.size())) + lambda * l1;
}

}  // namespace

Vector lasso_coordinate_descent(const Matrix& x, const Vector& y, double lambda,
                                std::size_t max_iters, double tol,
                                std::vector<double>* objective_trace,
                                std::size_t* sweeps_used) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n == 0 || p == 0) throw InvalidArgument("lasso: empty design");
  if (y.size() != n) throw InvalidArgument("lasso: row count does not match target");
  if (lambda < 0.0) throw InvalidArgument("lasso: lambda must be >= 0");
  if (!all_finite(x.data()) || !all_finite(y)) {
    throw DataError("lasso: non-finite values in input");
  }

  // Per-coordinate curvature (1/N) sum_i x_ij^2; constant columns get a
  // guard so they simply stay at zero.
  Vector col_sq(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) col_sq[j] += x(i, j) * x(i, j);
  }
  for (auto& v : col_sq) v /= static_cast<double>(n);

  Vector beta(p, 0.0);
  Vector residual = y;  // y - X beta, maintained incrementally
  std::size_t sweep = 0;
  for (; sweep < max_iters; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (col_sq[j] == 0.0) continue;
      double rho = 0.0;
      for (std::size_t i = 0; i < n; ++i) rho += x(i, j) * residual[i];
      rho = rho / static_cast<double>(n) + col_sq[j] * beta[j];
      const double updated = soft_threshold(rho, lambda) / col_sq[j];
      const double change = updated - beta[j];
      if (change != 0.0) {
        for (std::size_t i = 0; i < n; ++i) residual[i] -= change * x(i, j);
        beta[j] = updated;
      }
      max_change = std::max(max_change, std::fabs(change));
    }
    if (objective_trace) {
      objective_trace->push_back(lasso_objective(x, y, beta, lambda, residual));
    }
    if (max_change < tol) {
      ++sweep;
      break;
    }
  }
  if (sweeps_used) *sweeps_used = sweep;
  return beta;
}

double LassoModel::predict(std::span<const double> raw) const {
  const Vector xs = standardizer.apply(raw);
  double out = intercept;
  for (std::size_t j = 0; j < xs.size(); ++j) out += coefficients[j] * xs[j];
  return out;
}

LassoModel train_lasso(const Matrix& x, const Vector& y, double lambda,
                       std::size_t max_iters, double tol,
                       std::vector<std::string>* warnings) {
  if (x.rows() == 0) throw InvalidArgument("lasso: empty training set");
  if (y.size() != x.rows()) throw InvalidArgument("lasso: target length mismatch");

  LassoModel model;
  model.lambda = lambda;
  model.standardizer = Standardizer::fit(x);
  if (warnings && !model.standardizer.dropped_columns.empty()) {
    warnings->push_back(std::to_string(model.standardizer.dropped_columns.size()) +
                        " zero-variance feature column(s) removed");
  }
  const Matrix xs = model.standardizer.apply(x);

  // Standardized columns have mean zero, so the intercept decouples and is
  // the target mean; coordinate descent runs on the centered target.
  model.intercept = mean(y);
  Vector centered(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) centered[i] = y[i] - model.intercept;

  model.coefficients =
      lasso_coordinate_descent(xs, centered, lambda, max_iters, tol, nullptr, &model.sweeps);
  return model;
}

}  // namespace mccqr
