#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "harness.hpp"
#include "mccqr/occlusion.hpp"

using namespace mccqr;

namespace {

RegionAtlas two_null_one_signal_atlas(std::size_t d) {
  RegionAtlas atlas;
  atlas.feature_count = d;
  atlas.regions.push_back({"signal", {0}});
  atlas.regions.push_back({"null_a", {1, 2}});
  atlas.regions.push_back({"null_b", {3}});
  return atlas;
}

}  // namespace

TEST_CASE("occlude basics") {
  const Vector x{1.0, 2.0, 3.0, 4.0};
  SUBCASE("empty region leaves input unchanged") { CHECK(occlude(x, {}) == x); }
  SUBCASE("full region zeroes everything") {
    CHECK(occlude(x, {0, 1, 2, 3}) == Vector(4, 0.0));
  }
  SUBCASE("disjoint composition equals the union") {
    const Vector ab = occlude(occlude(x, {0}), {2});
    CHECK(ab == occlude(x, {0, 2}));
  }
  SUBCASE("out of range") { CHECK_THROWS_AS(occlude(x, {7}), InvalidArgument); }
}

TEST_CASE("atlas csv parsing") {
  const std::string good =
      "region_name,feature_index\nhippocampus,0\nhippocampus,1\ncerebellum,2\n";
  const RegionAtlas atlas = RegionAtlas::from_csv_text(good, 4);
  REQUIRE(atlas.regions.size() == 2);
  CHECK(atlas.regions[0].name == "hippocampus");
  CHECK(atlas.regions[0].indices == std::vector<std::size_t>{0, 1});
  CHECK(atlas.regions[1].indices == std::vector<std::size_t>{2});

  CHECK_THROWS_WITH_AS(RegionAtlas::from_csv_text("bad header\n", 4),
                       doctest::Contains("region_name,feature_index"), DataError);
  CHECK_THROWS_WITH_AS(
      RegionAtlas::from_csv_text("region_name,feature_index\na,0\nb,0\n", 4),
      doctest::Contains("more than one region"), DataError);
  CHECK_THROWS_WITH_AS(RegionAtlas::from_csv_text("region_name,feature_index\na,9\n", 4),
                       doctest::Contains("only 4 features"), DataError);
  CHECK_THROWS_WITH_AS(RegionAtlas::from_csv_text("region_name,feature_index\na,x\n", 4),
                       doctest::Contains("row 2"), DataError);
}

TEST_CASE("occlusion deltas") {
  // Feature 0 carries weight; features 1..3 have zero weight and zero mean.
  const std::size_t d = 4;
  Vector weights{0.4, 0.0, 0.0, 0.0};
  Vector means{2.0, 0.0, 0.0, 0.0};
  const MccqrModel model = harness::planted_linear_model(weights, means, 1.0, 101);

  Rng data_rng(3);
  const std::size_t n = 24;
  Matrix x(n, d);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 2.0 + 0.5 * data_rng.normal(1)[0];
    for (std::size_t j = 1; j < d; ++j) x(i, j) = data_rng.normal(1)[0];
    y[i] = forward_heads(model, x.row(i))[50];  // tau = 0.5 head
  }
  const RegionAtlas atlas = two_null_one_signal_atlas(d);

  Rng rng(11);
  const OcclusionResult result = occlusion_deltas(model, x, y, atlas, 400, rng);
  CHECK(result.samples() == n);
  CHECK(result.region_names.size() == 3);

  SUBCASE("zero-weight regions have exactly zero delta") {
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(result.delta(i, 1) == 0.0);
      CHECK(result.delta(i, 2) == 0.0);
    }
  }

  SUBCASE("signal region delta sign matches the linear hand computation") {
    // Occluding feature 0 shifts h by -w0 * x0; with x0 > 0 and w0 > 0 the
    // corrected gap must drop.
    for (std::size_t i = 0; i < n; ++i) CHECK(result.delta(i, 0) < 0.0);
  }

  SUBCASE("reproducible bit-for-bit") {
    Rng rng_b(11);
    const OcclusionResult again = occlusion_deltas(model, x, y, atlas, 400, rng_b);
    CHECK(again.bag_corrected.data() == result.bag_corrected.data());
  }

  SUBCASE("threaded run is identical") {
    Rng rng_b(11);
    const OcclusionResult par = occlusion_deltas(model, x, y, atlas, 400, rng_b, 4);
    CHECK(par.bag_corrected.data() == result.bag_corrected.data());
  }

  SUBCASE("long format export") {
    const std::string csv = occlusion_long_csv(result, {{"age", y}});
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 1 + n * (3 + 1));  // header + N*(R+1)
    CHECK(csv.rfind("sample_id,region,region_size,bag_corrected,age", 0) == 0);
    CHECK(csv.find(kNoOcclusionLabel) != std::string::npos);
    CHECK(csv.find("null_a") != std::string::npos);
  }
}

TEST_CASE("region contrast fit recovers a planted effect") {
  const std::size_t d = 6;
  const std::size_t k = 101;
  const double kappa = harness::clamped_normal_std(k);
  const double target = -0.5;
  // Effect on the corrected gap is -w0 * mean(x0) / kappa at sigma_a = 1.
  const double mean_x0 = 2.0;
  Vector weights(d, 0.0);
  weights[0] = -target * kappa / mean_x0;
  for (std::size_t j = 1; j < d; ++j) weights[j] = 0.05;
  Vector means(d, 0.0);
  means[0] = mean_x0;
  const MccqrModel model = harness::planted_linear_model(weights, means, 1.0, k);

  Rng data_rng(7);
  const std::size_t n = 200;
  Matrix x(n, d);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = mean_x0 + 0.5 * data_rng.normal(1)[0];
    for (std::size_t j = 1; j < d; ++j) x(i, j) = data_rng.normal(1)[0];
    y[i] = forward_heads(model, x.row(i))[50];
  }

  RegionAtlas atlas;
  atlas.feature_count = d;
  atlas.regions.push_back({"signal", {0}});
  atlas.regions.push_back({"null_a", {1, 2}});
  atlas.regions.push_back({"null_b", {3, 4}});
  atlas.regions.push_back({"null_c", {5}});

  Rng rng(13);
  const OcclusionResult result = occlusion_deltas(model, x, y, atlas, 500, rng);
  const ContrastFit fit = region_contrast_fit(result, {{"age", y}});

  REQUIRE(fit.regions.size() == 4);
  CHECK(fit.n_rows == n * 5);
  CHECK(fit.regions[0].region == "signal");
  CHECK(std::fabs(fit.regions[0].estimate - target) < 0.15);
  CHECK(fit.regions[0].p_value < 1e-6);
  for (std::size_t r = 1; r < 4; ++r) {
    CHECK(std::fabs(fit.regions[r].estimate) < 2.0 * fit.regions[r].std_error);
  }

  // region_size is constant within each factor level, hence collinear with
  // the dummies and dropped.
  bool dropped_region_size = false;
  for (const auto& term : fit.dropped_terms) {
    dropped_region_size = dropped_region_size || term.find("region_size") != std::string::npos;
  }
  CHECK(dropped_region_size);

  const std::string json = contrast_fit_json(fit);
  CHECK(json.find("\"reference\"") != std::string::npos);
  CHECK(json.find("signal") != std::string::npos);
  CHECK(contrast_fit_table(fit).find("signal") != std::string::npos);
}

TEST_CASE("estimates follow the rank order of mean raw deltas") {
  const std::size_t d = 3;
  Vector weights{0.3, 0.15, 0.05};
  Vector means{2.0, 2.0, 2.0};
  const MccqrModel model = harness::planted_linear_model(weights, means, 1.0, 101);

  Rng data_rng(19);
  const std::size_t n = 120;
  Matrix x(n, d);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = 2.0 + 0.3 * data_rng.normal(1)[0];
    y[i] = forward_heads(model, x.row(i))[50];
  }
  RegionAtlas atlas;
  atlas.feature_count = d;
  atlas.regions.push_back({"r0", {0}});
  atlas.regions.push_back({"r1", {1}});
  atlas.regions.push_back({"r2", {2}});

  Rng rng(23);
  const OcclusionResult result = occlusion_deltas(model, x, y, atlas, 400, rng);
  const ContrastFit fit = region_contrast_fit(result, {});

  Vector mean_delta(3, 0.0);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t i = 0; i < n; ++i) mean_delta[r] += result.delta(i, r);
    mean_delta[r] /= static_cast<double>(n);
  }
  // Heavier weights produce more negative deltas; the fitted estimates must
  // sort the same way.
  CHECK(mean_delta[0] < mean_delta[1]);
  CHECK(mean_delta[1] < mean_delta[2]);
  CHECK(fit.regions[0].estimate < fit.regions[1].estimate);
  CHECK(fit.regions[1].estimate < fit.regions[2].estimate);
}

TEST_CASE("occlusion input validation") {
  const MccqrModel model =
      harness::planted_linear_model(Vector{0.1, 0.1}, Vector{0.0, 0.0}, 1.0, 5);
  Matrix x(3, 2, 1.0);
  Vector y(3, 0.0);
  RegionAtlas atlas;
  atlas.feature_count = 5;  // disagrees with the data
  atlas.regions.push_back({"a", {0}});
  Rng rng(1);
  CHECK_THROWS_AS(occlusion_deltas(model, x, y, atlas, 10, rng), InvalidArgument);

  RegionAtlas ok;
  ok.feature_count = 2;
  ok.regions.push_back({"a", {0}});
  Rng rng2(1);
  const OcclusionResult result = occlusion_deltas(model, x, y, ok, 10, rng2);
  CHECK_THROWS_AS(region_contrast_fit(result, {}), InvalidArgument);  // < 2 regions
  CHECK_THROWS_AS(region_contrast_fit(result, {{"age", Vector{1.0}}}), InvalidArgument);
}
