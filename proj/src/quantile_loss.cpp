#include "mccqr/quantile_loss.hpp"

#include <string>

namespace mccqr {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("tau must lie in (0, 1), got " + std::to_string(tau));
  }
}

void check_shapes(const Vector& y, const Matrix& yhat, const QuantileGrid& grid,
                  const char* op) {
  if (yhat.rows() != y.size() || yhat.cols() != grid.size()) {
    throw InvalidArgument(std::string(op) + ": yhat is " + std::to_string(yhat.rows()) +
                          "x" + std::to_string(yhat.cols()) + ", expected " +
                          std::to_string(y.size()) + "x" + std::to_string(grid.size()));
  }
  if (y.empty()) throw InvalidArgument(std::string(op) + ": empty sample vector");
}

}  // namespace

QuantileGrid::QuantileGrid(Vector taus) : taus_(std::move(taus)) {
  if (taus_.empty()) throw InvalidArgument("QuantileGrid: needs at least one tau");
  double prev = 0.0;
  for (double t : taus_) {
    if (!(t > 0.0 && t < 1.0)) {
      throw InvalidArgument("QuantileGrid: tau " + std::to_string(t) + " outside (0, 1)");
    }
    if (t <= prev) throw InvalidArgument("QuantileGrid: taus must be strictly increasing");
    prev = t;
  }
}

QuantileGrid QuantileGrid::equally_spaced(std::size_t count) {
  if (count == 0) throw InvalidArgument("QuantileGrid: count must be >= 1");
  Vector taus(count);
  for (std::size_t k = 0; k < count; ++k) {
    taus[k] = static_cast<double>(k + 1) / static_cast<double>(count + 1);
  }
  return QuantileGrid(std::move(taus));
}

double tilted_loss(double residual, double tau) {
  check_tau(tau);
  return residual >= 0.0 ? tau * residual : (tau - 1.0) * residual;
}

double tilted_loss_subgrad(double residual, double tau) {
  check_tau(tau);
  return residual >= 0.0 ? tau : tau - 1.0;
}

double composite_loss(const Vector& y, const Matrix& yhat, const QuantileGrid& grid) {
  check_shapes(y, yhat, grid, "composite_loss");
  double total = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      total += tilted_loss(y[t] - yhat(t, k), grid.tau(k));
    }
  }
  return total / (static_cast<double>(grid.size()) * static_cast<double>(y.size()));
}

Matrix composite_loss_grad(const Vector& y, const Matrix& yhat, const QuantileGrid& grid) {
  check_shapes(y, yhat, grid, "composite_loss_grad");
  const double scale =
      1.0 / (static_cast<double>(grid.size()) * static_cast<double>(y.size()));
  Matrix grad(yhat.rows(), yhat.cols());
  for (std::size_t t = 0; t < y.size(); ++t) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      grad(t, k) = -scale * tilted_loss_subgrad(y[t] - yhat(t, k), grid.tau(k));
    }
  }
  return grad;
}

}  // namespace mccqr
