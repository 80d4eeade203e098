#pragma once

#include "mccqr/linalg.hpp"

namespace mccqr {

// Strictly increasing quantile probabilities in (0,1), shared by the
// composite loss and prediction-time interpolation.
class QuantileGrid {
 public:
  explicit QuantileGrid(Vector taus);
  // tau_k = k/(count+1) for k = 1..count.
  static QuantileGrid equally_spaced(std::size_t count);

  std::size_t size() const { return taus_.size(); }
  double tau(std::size_t k) const { return taus_[k]; }
  const Vector& taus() const { return taus_; }

 private:
  Vector taus_;
};

// Pinball loss: tau*eps for eps >= 0, (tau-1)*eps otherwise. Requires
// 0 < tau < 1.
double tilted_loss(double residual, double tau);

// d tilted_loss / d eps, with the eps = 0 tie resolved to tau (the eps >= 0
// branch).
double tilted_loss_subgrad(double residual, double tau);

// E = (1/(K*N)) sum_k sum_t tilted_loss(y_t - yhat(t,k), tau_k).
// yhat column k is the prediction at tau_k.
double composite_loss(const Vector& y, const Matrix& yhat, const QuantileGrid& grid);

// dE/dyhat(t,k); entry (t,k) is -subgrad(y_t - yhat(t,k), tau_k)/(K*N).
Matrix composite_loss_grad(const Vector& y, const Matrix& yhat, const QuantileGrid& grid);

}  // namespace mccqr
