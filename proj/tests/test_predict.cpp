#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mccqr/predict.hpp"

using namespace mccqr;

namespace {

Standardizer identity_standardizer(std::size_t d) {
  Standardizer s;
  s.raw_dim = d;
  s.means = Vector(d, 0.0);
  s.stds = Vector(d, 1.0);
  return s;
}

// Hand-built model: heads_k = slope * x + offset_k.
MccqrModel linear_model(std::size_t k, double slope, const Vector& offsets,
                        double dropout_rate) {
  NetworkParams p;
  p.w1 = Matrix(1, 1);
  p.w1(0, 0) = 1.0;
  p.b1 = Vector{100.0};  // keeps the ReLU active for |x| < 100
  p.w2 = Matrix(1, k);
  for (std::size_t i = 0; i < k; ++i) p.w2(0, i) = slope;
  Vector b2(k);
  for (std::size_t i = 0; i < k; ++i) b2[i] = offsets[i] - 100.0 * slope;
  p.b2 = b2;
  TrainConfig config;
  config.dropout_rate = dropout_rate;
  config.quantile_count = k;
  config.hidden_units = 1;
  return MccqrModel(std::move(p), QuantileGrid::equally_spaced(k), config,
                    identity_standardizer(1), {});
}

}  // namespace

TEST_CASE("interpolate_quantile") {
  const QuantileGrid grid{Vector{0.25, 0.5, 0.75}};
  const Vector heads{0.0, 1.0, 4.0};

  SUBCASE("knot identity") {
    CHECK(interpolate_quantile(heads, grid, 0.25) == 0.0);
    CHECK(interpolate_quantile(heads, grid, 0.5) == 1.0);
    CHECK(interpolate_quantile(heads, grid, 0.75) == 4.0);
  }
  SUBCASE("hand interpolation") {
    CHECK(interpolate_quantile(heads, grid, 0.625) == doctest::Approx(2.5).epsilon(1e-15));
  }
  SUBCASE("clamping outside the grid") {
    CHECK(interpolate_quantile(heads, grid, 0.01) == 0.0);
    CHECK(interpolate_quantile(heads, grid, 0.99) == 4.0);
  }
  SUBCASE("linear heads reproduce the line") {
    const QuantileGrid g5 = QuantileGrid::equally_spaced(5);
    Vector linear(5);
    for (std::size_t k = 0; k < 5; ++k) linear[k] = 3.0 * g5.tau(k) - 1.0;
    for (double tau : {0.2, 0.33, 0.5, 0.71}) {
      CHECK(interpolate_quantile(linear, g5, tau) ==
            doctest::Approx(3.0 * tau - 1.0).epsilon(1e-12));
    }
  }
  SUBCASE("needs two knots") {
    CHECK_THROWS_AS(interpolate_quantile(Vector{1.0}, QuantileGrid(Vector{0.5}), 0.5),
                    InvalidArgument);
  }
}

TEST_CASE("constant heads collapse the distribution") {
  const MccqrModel model = linear_model(5, 0.0, Vector(5, 2.5), 0.2);
  Rng rng(3);
  const auto dist = predict_distribution(model, Vector{0.7}, 200, UncertaintyMode::Full, rng);
  CHECK(dist.median == 2.5);
  CHECK(dist.std_dev == 0.0);
  for (double d : dist.draws) CHECK(d == 2.5);
}

TEST_CASE("aleatory-only prediction is deterministic per seed") {
  Vector offsets{-1.0, -0.5, 0.0, 0.5, 1.0};
  const MccqrModel model = linear_model(5, 1.0, offsets, 0.2);
  Rng a(9), b(9);
  const auto da = predict_distribution(model, Vector{0.2}, 1, UncertaintyMode::AleatoryOnly, a);
  const auto db = predict_distribution(model, Vector{0.2}, 1, UncertaintyMode::AleatoryOnly, b);
  CHECK(da.draws == db.draws);
}

TEST_CASE("full mode is reproducible bit-for-bit") {
  Vector offsets{-2.0, 0.0, 2.0};
  const MccqrModel model = linear_model(3, 0.5, offsets, 0.3);
  Rng a(1234), b(1234);
  const auto da = predict_distribution(model, Vector{1.0}, 500, UncertaintyMode::Full, a);
  const auto db = predict_distribution(model, Vector{1.0}, 500, UncertaintyMode::Full, b);
  CHECK(da.draws == db.draws);
  CHECK(da.median == db.median);
  CHECK(da.std_dev == db.std_dev);
}

TEST_CASE("median sits inside the draw range") {
  Vector offsets{-1.0, 0.0, 3.0};
  const MccqrModel model = linear_model(3, 2.0, offsets, 0.2);
  Rng rng(77);
  const auto dist = predict_distribution(model, Vector{0.4}, 333, UncertaintyMode::Full, rng);
  const double lo = *std::min_element(dist.draws.begin(), dist.draws.end());
  const double hi = *std::max_element(dist.draws.begin(), dist.draws.end());
  CHECK(dist.median >= lo);
  CHECK(dist.median <= hi);
}

TEST_CASE("epistemic-only spread vanishes at dropout rate zero") {
  Vector offsets{-1.0, 0.0, 1.0};
  const MccqrModel model = linear_model(3, 1.0, offsets, 0.0);
  Rng rng(5);
  const auto dist =
      predict_distribution(model, Vector{0.3}, 100, UncertaintyMode::EpistemicOnly, rng);
  CHECK(dist.std_dev == 0.0);
}

TEST_CASE("aleatory-only draws stay within the deterministic head range") {
  Vector offsets{-3.0, -1.0, 0.0, 2.0, 5.0};
  const MccqrModel model = linear_model(5, 1.5, offsets, 0.2);
  const Vector x{0.8};
  const Vector heads = forward_heads(model, x);
  const double lo = *std::min_element(heads.begin(), heads.end());
  const double hi = *std::max_element(heads.begin(), heads.end());
  Rng rng(10);
  const auto dist = predict_distribution(model, x, 2000, UncertaintyMode::AleatoryOnly, rng);
  for (double d : dist.draws) {
    CHECK(d >= lo);
    CHECK(d <= hi);
  }
}

TEST_CASE("predict_batch") {
  Vector offsets{-1.0, 0.0, 1.0};
  const MccqrModel model = linear_model(3, 1.0, offsets, 0.2);
  Matrix x(4, 1);
  x(0, 0) = -0.5;
  x(1, 0) = 0.0;
  x(2, 0) = 0.5;
  x(3, 0) = 1.0;

  SUBCASE("empty input gives empty output") {
    Rng rng(1);
    CHECK(predict_batch(model, Matrix(), 10, UncertaintyMode::Full, rng).empty());
  }

  SUBCASE("same seed, same outputs") {
    Rng a(42), b(42);
    const auto da = predict_batch(model, x, 50, UncertaintyMode::Full, a);
    const auto db = predict_batch(model, x, 50, UncertaintyMode::Full, b);
    for (std::size_t i = 0; i < 4; ++i) CHECK(da[i].draws == db[i].draws);
  }

  SUBCASE("equals per-sample calls on split streams") {
    Rng batch_rng(42);
    const auto batch = predict_batch(model, x, 50, UncertaintyMode::Full, batch_rng);
    Rng manual_rng(42);
    auto streams = manual_rng.split(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto single =
          predict_distribution(model, x.row(i), 50, UncertaintyMode::Full, streams[i]);
      CHECK(batch[i].draws == single.draws);
    }
  }

  SUBCASE("threaded evaluation is identical") {
    Rng a(42), b(42);
    const auto serial = predict_batch(model, x, 50, UncertaintyMode::Full, a, 1);
    const auto parallel = predict_batch(model, x, 50, UncertaintyMode::Full, b, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(serial[i].draws == parallel[i].draws);
      CHECK(serial[i].median == parallel[i].median);
    }
  }
}

TEST_CASE("predict input validation") {
  Vector offsets{-1.0, 0.0, 1.0};
  const MccqrModel model = linear_model(3, 1.0, offsets, 0.2);
  Rng rng(2);
  CHECK_THROWS_AS(predict_distribution(model, Vector{1.0, 2.0}, 10, UncertaintyMode::Full, rng),
                  InvalidArgument);
  CHECK_THROWS_AS(predict_distribution(model, Vector{1.0}, 0, UncertaintyMode::Full, rng),
                  InvalidArgument);
}
