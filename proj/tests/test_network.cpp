#include <cmath>

#include "doctest.h"
#include "mccqr/network.hpp"

using namespace mccqr;

namespace {

std::vector<double*> parameter_entries(NetworkParams& p) {
  std::vector<double*> out;
  for (auto& v : p.w1.data()) out.push_back(&v);
  for (auto& v : p.b1) out.push_back(&v);
  for (auto& v : p.w2.data()) out.push_back(&v);
  for (auto& v : p.b2) out.push_back(&v);
  return out;
}

std::vector<double> gradient_entries(const Gradients& g) {
  std::vector<double> out;
  for (double v : g.w1.data()) out.push_back(v);
  for (double v : g.b1) out.push_back(v);
  for (double v : g.w2.data()) out.push_back(v);
  for (double v : g.b2) out.push_back(v);
  return out;
}

double sample_loss(const NetworkParams& p, std::span<const double> x,
                   std::span<const double> mask, double rate, double y,
                   const QuantileGrid& grid) {
  const Vector heads = forward(p, x, mask, rate);
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    total += tilted_loss(y - heads[k], grid.tau(k));
  }
  return total / static_cast<double>(grid.size());
}

// True when the configuration sits safely away from ReLU kinks and pinball
// kinks, where subgradients and finite differences disagree.
bool away_from_kinks(const NetworkParams& p, std::span<const double> x,
                     std::span<const double> mask, double rate, double y,
                     const QuantileGrid& grid) {
  const ForwardTrace trace = forward_trace(p, x, mask, rate);
  for (double z : trace.pre_hidden) {
    if (std::fabs(z) < 1e-4) return false;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::fabs(y - trace.heads[k]) < 1e-4) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("init_params bounds, zero biases, determinism") {
  Rng rng(12);
  const NetworkParams p = init_params(10, 32, 101, rng);
  for (double b : p.b1) CHECK(b == 0.0);
  for (double b : p.b2) CHECK(b == 0.0);
  const double bound1 = std::sqrt(6.0 / 10.0);
  for (double w : p.w1.data()) {
    CHECK(w >= -bound1);
    CHECK(w <= bound1);
  }
  // Head layer starts at zero: every head identical until gradients separate
  // them in tau order.
  for (double w : p.w2.data()) CHECK(w == 0.0);
  Rng rng_b(12);
  const NetworkParams q = init_params(10, 32, 101, rng_b);
  CHECK(p.w1.data() == q.w1.data());
  CHECK(p.w2.data() == q.w2.data());
}

TEST_CASE("parameter count formula") {
  Rng rng(1);
  const NetworkParams small = init_params(3, 4, 5, rng);
  CHECK(small.parameter_count() == 3 * 4 + 4 + 4 * 5 + 5);
  NetworkParams production_scale;
  production_scale.w1 = Matrix(39573, 32);
  production_scale.b1 = Vector(32, 0.0);
  production_scale.w2 = Matrix(32, 101);
  production_scale.b2 = Vector(101, 0.0);
  CHECK(production_scale.parameter_count() == 1269701);
}

TEST_CASE("forward zero network") {
  NetworkParams p;
  p.w1 = Matrix(3, 4);
  p.b1 = Vector(4, 0.0);
  p.w2 = Matrix(4, 2);
  p.b2 = Vector(2, 0.0);
  const Vector out = forward(p, Vector{1.0, -2.0, 0.5});
  CHECK(out == Vector{0.0, 0.0});
}

TEST_CASE("forward all-ones mask at rate 0 equals maskless bit-for-bit") {
  Rng rng(44);
  const NetworkParams p = init_params(5, 8, 7, rng);
  const Vector x = rng.normal(5);
  const Vector ones(8, 1.0);
  CHECK(forward(p, x) == forward(p, x, ones, 0.0));
}

TEST_CASE("forward single-unit hand example") {
  NetworkParams p;
  p.w1 = Matrix(1, 1);
  p.w1(0, 0) = 2.0;
  p.b1 = Vector{1.0};
  p.w2 = Matrix(1, 2);
  p.w2(0, 0) = 1.0;
  p.w2(0, 1) = -1.0;
  p.b2 = Vector{0.0, 0.0};
  const Vector out = forward(p, Vector{0.5});
  CHECK(out[0] == 2.0);
  CHECK(out[1] == -2.0);
}

TEST_CASE("forward dimension mismatch") {
  Rng rng(9);
  const NetworkParams p = init_params(4, 3, 2, rng);
  CHECK_THROWS_AS(forward(p, Vector{1.0, 2.0}), InvalidArgument);
  CHECK_THROWS_AS(forward(p, Vector(4, 0.0), Vector(5, 1.0), 0.2), InvalidArgument);
}

TEST_CASE("backprop matches central finite differences on tiny nets") {
  Rng rng(77);
  const QuantileGrid grid = QuantileGrid::equally_spaced(5);
  int tested = 0;
  for (int trial = 0; trial < 12 && tested < 5; ++trial) {
    NetworkParams p = init_params(3, 4, 5, rng);
    const Vector x = rng.normal(3);
    const double y = rng.normal(1)[0];
    const Vector mask = rng.bernoulli_mask(4, 0.25);
    if (!away_from_kinks(p, x, mask, 0.25, y, grid)) continue;
    ++tested;

    const Gradients analytic = backprop(p, x, mask, 0.25, y, grid);
    const std::vector<double> grad = gradient_entries(analytic);
    const std::vector<double*> entries = parameter_entries(p);
    const double h = 1e-6;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double saved = *entries[i];
      *entries[i] = saved + h;
      const double up = sample_loss(p, x, mask, 0.25, y, grid);
      *entries[i] = saved - h;
      const double down = sample_loss(p, x, mask, 0.25, y, grid);
      *entries[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(grad[i]), 1e-4});
      CHECK(std::fabs(fd - grad[i]) / denom < 1e-6);
    }
  }
  CHECK(tested == 5);
}

TEST_CASE("dropped hidden units get exactly zero gradients") {
  Rng rng(5);
  NetworkParams p = init_params(3, 4, 2, rng);
  const Vector x{0.4, -1.2, 2.0};
  Vector mask{1.0, 0.0, 1.0, 0.0};
  const QuantileGrid grid = QuantileGrid::equally_spaced(2);
  const Gradients g = backprop(p, x, mask, 0.5, 0.7, grid);
  for (std::size_t j : {std::size_t{1}, std::size_t{3}}) {
    CHECK(g.b1[j] == 0.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(g.w1(i, j) == 0.0);
    for (std::size_t k = 0; k < 2; ++k) CHECK(g.w2(j, k) == 0.0);
  }
}

TEST_CASE("head-gradient accumulation is linear") {
  Rng rng(15);
  NetworkParams p = init_params(3, 4, 5, rng);
  const Vector x = rng.normal(3);
  const QuantileGrid grid = QuantileGrid::equally_spaced(5);
  const ForwardTrace trace = forward_trace(p, x, {}, 0.0);
  Vector dheads(5);
  for (std::size_t k = 0; k < 5; ++k) {
    dheads[k] = -tilted_loss_subgrad(1.0 - trace.heads[k], grid.tau(k)) / 5.0;
  }
  Gradients once = Gradients::zeros_like(p);
  backprop_from_head_grad(p, x, {}, 0.0, trace, dheads, once);
  Gradients twice = Gradients::zeros_like(p);
  backprop_from_head_grad(p, x, {}, 0.0, trace, dheads, twice);
  backprop_from_head_grad(p, x, {}, 0.0, trace, dheads, twice);
  const auto g1 = gradient_entries(once);
  const auto g2 = gradient_entries(twice);
  for (std::size_t i = 0; i < g1.size(); ++i) {
    CHECK(g2[i] == doctest::Approx(2.0 * g1[i]).epsilon(1e-15));
  }
}

TEST_CASE("adam zero gradient leaves parameters unchanged") {
  Rng rng(21);
  NetworkParams p = init_params(2, 3, 2, rng);
  const NetworkParams before = p;
  AdamState state = AdamState::zeros_like(p);
  TrainConfig config;
  adam_step(p, Gradients::zeros_like(p), state, config);
  CHECK(p.w1.data() == before.w1.data());
  CHECK(p.b1 == before.b1);
  CHECK(p.w2.data() == before.w2.data());
  CHECK(p.b2 == before.b2);
  CHECK(state.step == 1);
}

TEST_CASE("adam first step moves by about lr*sign(g)") {
  Rng rng(22);
  NetworkParams p = init_params(2, 2, 2, rng);
  const NetworkParams before = p;
  Gradients g = Gradients::zeros_like(p);
  for (auto& v : g.w1.data()) v = 0.37;
  for (auto& v : g.b1) v = -0.9;
  AdamState state = AdamState::zeros_like(p);
  TrainConfig config;
  adam_step(p, g, state, config);
  for (std::size_t i = 0; i < p.w1.data().size(); ++i) {
    CHECK(before.w1.data()[i] - p.w1.data()[i] ==
          doctest::Approx(config.learning_rate).epsilon(1e-6));
  }
  for (std::size_t i = 0; i < p.b1.size(); ++i) {
    CHECK(before.b1[i] - p.b1[i] == doctest::Approx(-config.learning_rate).epsilon(1e-6));
  }
}

TEST_CASE("adam two steps match a scalar reference implementation") {
  // Reference: textbook Adam on a single scalar.
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double g1 = 0.42, g2 = -0.17;
  double theta_ref = 1.5, m = 0.0, v = 0.0;
  int t = 0;
  for (double g : {g1, g2}) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    theta_ref -= lr * mhat / (std::sqrt(vhat) + eps);
  }

  NetworkParams p;
  p.w1 = Matrix(1, 1);
  p.w1(0, 0) = 1.5;
  p.b1 = Vector{0.0};
  p.w2 = Matrix(1, 1);
  p.b2 = Vector{0.0};
  AdamState state = AdamState::zeros_like(p);
  TrainConfig config;
  Gradients g = Gradients::zeros_like(p);
  g.w1(0, 0) = g1;
  adam_step(p, g, state, config);
  g.w1(0, 0) = g2;
  adam_step(p, g, state, config);
  CHECK(p.w1(0, 0) == doctest::Approx(theta_ref).epsilon(1e-12));
}

TEST_CASE("standardizer fit/apply") {
  Rng rng(33);
  Matrix x(50, 4);
  for (auto& v : x.data()) v = 3.0 * rng.uniform() + 1.0;
  for (std::size_t r = 0; r < 50; ++r) x(r, 2) = 7.0;  // zero variance
  const Standardizer s = Standardizer::fit(x);
  CHECK(s.raw_dim == 4);
  CHECK(s.kept_dim() == 3);
  CHECK(s.dropped_columns == std::vector<std::size_t>{2});
  const Matrix xs = s.apply(x);
  for (std::size_t c = 0; c < 3; ++c) {
    Vector col(50);
    for (std::size_t r = 0; r < 50; ++r) col[r] = xs(r, c);
    CHECK(std::fabs(mean(col)) < 1e-10);
    CHECK(std::fabs(population_std(col) - 1.0) < 1e-10);
  }
}

TEST_CASE("standardizer rejects all-constant input") {
  Matrix x(5, 2, 3.0);
  CHECK_THROWS_AS(Standardizer::fit(x), DataError);
}
