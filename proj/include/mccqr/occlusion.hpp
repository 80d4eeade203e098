#pragma once

#include <string>
#include <vector>

#include "mccqr/gap_analysis.hpp"
#include "mccqr/predict.hpp"

namespace mccqr {

// Named, disjoint feature-index sets covering (a subset of) the d inputs.
struct RegionAtlas {
  struct Region {
    std::string name;
    std::vector<std::size_t> indices;
  };
  std::vector<Region> regions;
  std::size_t feature_count = 0;

  // CSV with header "region_name,feature_index", one row per pair.
  static RegionAtlas from_csv_text(const std::string& text, std::size_t feature_count);
  static RegionAtlas from_csv_file(const std::string& path, std::size_t feature_count);

  void validate() const;
};

// Raw-space copy with the region's features set to zero; standardization is
// applied after occlusion, so a zeroed feature reaches the model as -mean/std.
Vector occlude(std::span<const double> x, const std::vector<std::size_t>& indices);

// Factor level name for the un-occluded reference rows.
inline constexpr const char* kNoOcclusionLabel = "none";

struct OcclusionResult {
  std::vector<std::string> region_names;
  std::vector<std::size_t> region_sizes;
  // n x (R+1): column 0 is the un-occluded corrected gap, column r+1 the
  // corrected gap with region r occluded.
  Matrix bag_corrected;
  Vector y;

  std::size_t samples() const { return bag_corrected.rows(); }
  double delta(std::size_t sample, std::size_t region) const {
    return bag_corrected(sample, region + 1) - bag_corrected(sample, 0);
  }
};

// Full-input and per-region occluded predictions for every sample. The full
// and occluded passes of one sample replay the same rng stream, so the delta
// isolates the occlusion effect from Monte-Carlo noise.
OcclusionResult occlusion_deltas(const MccqrModel& model, const Matrix& x, const Vector& y,
                                 const RegionAtlas& atlas, std::size_t t_draws, Rng& rng,
                                 unsigned threads = 1);

struct RegionEffect {
  std::string region;
  double estimate = 0.0;  // difference from the un-occluded reference
  double std_error = 0.0;
  double ci_low = 0.0;  // large-sample 95% interval
  double ci_high = 0.0;
  double p_value = 1.0;  // Wald t against zero
};

struct ContrastFit {
  std::vector<RegionEffect> regions;
  std::vector<std::string> covariates;      // as entered, including region_size
  std::vector<std::string> dropped_terms;   // rank-deficient columns removed
  std::size_t n_rows = 0;                   // long-format rows = n * (R+1)
  std::size_t residual_dof = 0;
};

// Fixed-effects OLS of the long-format corrected gaps on a region factor
// (treatment contrasts, un-occluded reference) plus covariates. Sample-level
// covariates repeat across a sample's rows; region_size is attached per row
// (0 for the reference level). Rank-deficient covariates are dropped with a
// warning.
ContrastFit region_contrast_fit(const OcclusionResult& result,
                                const std::vector<std::pair<std::string, Vector>>&
                                    sample_covariates);

std::string contrast_fit_json(const ContrastFit& fit);
std::string contrast_fit_table(const ContrastFit& fit);

// Long-format export: sample_id, region, region_size, bag_corrected, then one
// column per covariate. Row count is samples * (regions + 1).
std::string occlusion_long_csv(const OcclusionResult& result,
                               const std::vector<std::pair<std::string, Vector>>&
                                   sample_covariates);

}  // namespace mccqr
