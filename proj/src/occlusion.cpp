#include "mccqr/occlusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mccqr/stats.hpp"

namespace mccqr {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

RegionAtlas RegionAtlas::from_csv_text(const std::string& text, std::size_t feature_count) {
  RegionAtlas atlas;
  atlas.feature_count = feature_count;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || (line != "region_name,feature_index")) {
    throw DataError("atlas csv: expected header 'region_name,feature_index'");
  }
  std::map<std::string, std::size_t> by_name;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("atlas csv: row " + std::to_string(row) + " has no comma");
    }
    const std::string name = line.substr(0, comma);
    if (name.empty()) {
      throw DataError("atlas csv: row " + std::to_string(row) + " has an empty region name");
    }
    std::size_t index = 0;
    const auto res =
        std::from_chars(line.data() + comma + 1, line.data() + line.size(), index);
    if (res.ec != std::errc{} || res.ptr != line.data() + line.size()) {
      throw DataError("atlas csv: row " + std::to_string(row) +
                      ", column feature_index is not a non-negative integer");
    }
    auto [it, inserted] = by_name.try_emplace(name, atlas.regions.size());
    if (inserted) atlas.regions.push_back({name, {}});
    atlas.regions[it->second].indices.push_back(index);
  }
  atlas.validate();
  return atlas;
}

RegionAtlas RegionAtlas::from_csv_file(const std::string& path, std::size_t feature_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open atlas file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_csv_text(text, feature_count);
}

void RegionAtlas::validate() const {
  if (regions.empty()) throw DataError("atlas: no regions");
  std::set<std::size_t> seen;
  for (const auto& region : regions) {
    if (region.indices.empty()) {
      throw DataError("atlas: region '" + region.name + "' has no features");
    }
    for (std::size_t idx : region.indices) {
      if (idx >= feature_count) {
        throw DataError("atlas: region '" + region.name + "' references feature " +
                        std::to_string(idx) + ", but the data has only " +
                        std::to_string(feature_count) + " features");
      }
      if (!seen.insert(idx).second) {
        throw DataError("atlas: feature " + std::to_string(idx) +
                        " appears in more than one region (regions must be disjoint)");
      }
    }
  }
}

Vector occlude(std::span<const double> x, const std::vector<std::size_t>& indices) {
  Vector out(x.begin(), x.end());
  for (std::size_t idx : indices) {
    if (idx >= out.size()) {
      throw InvalidArgument("occlude: index " + std::to_string(idx) +
                            " out of range for " + std::to_string(out.size()) + " features");
    }
    out[idx] = 0.0;
  }
  return out;
}

OcclusionResult occlusion_deltas(const MccqrModel& model, const Matrix& x, const Vector& y,
                                 const RegionAtlas& atlas, std::size_t t_draws, Rng& rng,
                                 unsigned threads) {
  if (x.rows() == 0) throw InvalidArgument("occlusion: empty input");
  if (y.size() != x.rows()) throw InvalidArgument("occlusion: target length mismatch");
  if (x.cols() != model.raw_input_dim()) {
    throw InvalidArgument("occlusion: data has " + std::to_string(x.cols()) +
                          " features, model expects " +
                          std::to_string(model.raw_input_dim()));
  }
  if (atlas.feature_count != x.cols()) {
    throw InvalidArgument("occlusion: atlas covers " + std::to_string(atlas.feature_count) +
                          " features, data has " + std::to_string(x.cols()));
  }
  atlas.validate();

  const std::size_t n = x.rows();
  const std::size_t r = atlas.regions.size();
  OcclusionResult result;
  for (const auto& region : atlas.regions) {
    result.region_names.push_back(region.name);
    result.region_sizes.push_back(region.indices.size());
  }
  result.bag_corrected = Matrix(n, r + 1);
  result.y = y;

  std::vector<Rng> streams = rng.split(n);

  auto run_sample = [&](std::size_t i) {
    // The same stream replayed for the full pass and every occluded pass.
    Rng full_rng = streams[i];
    const PredictiveDistribution full =
        predict_distribution(model, x.row(i), t_draws, UncertaintyMode::Full, full_rng);
    result.bag_corrected(i, 0) = make_gap_record(y[i], full.median, full.std_dev).bag_corrected;
    for (std::size_t reg = 0; reg < r; ++reg) {
      const Vector occluded = occlude(x.row(i), atlas.regions[reg].indices);
      Rng occ_rng = streams[i];
      const PredictiveDistribution dist =
          predict_distribution(model, occluded, t_draws, UncertaintyMode::Full, occ_rng);
      result.bag_corrected(i, reg + 1) =
          make_gap_record(y[i], dist.median, dist.std_dev).bag_corrected;
    }
  };

  const unsigned worker_count =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (worker_count == 1) {
    for (std::size_t i = 0; i < n; ++i) run_sample(i);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += worker_count) run_sample(i);
      });
    }
    for (auto& t : workers) t.join();
  }
  return result;
}

namespace {

void check_sample_covariates(const OcclusionResult& result,
                             const std::vector<std::pair<std::string, Vector>>& covs) {
  for (const auto& [name, values] : covs) {
    if (values.size() != result.samples()) {
      throw InvalidArgument("occlusion: covariate '" + name + "' has " +
                            std::to_string(values.size()) + " entries, expected " +
                            std::to_string(result.samples()));
    }
    if (name == "region_size") {
      throw InvalidArgument("occlusion: 'region_size' is attached automatically");
    }
  }
}

}  // namespace

ContrastFit region_contrast_fit(const OcclusionResult& result,
                                const std::vector<std::pair<std::string, Vector>>&
                                    sample_covariates) {
  const std::size_t n = result.samples();
  const std::size_t r = result.region_names.size();
  if (n == 0) throw InvalidArgument("region_contrast_fit: no samples");
  if (r < 2) throw InvalidArgument("region_contrast_fit: need at least two regions");
  check_sample_covariates(result, sample_covariates);

  const std::size_t rows = n * (r + 1);
  // intercept | region dummies | sample covariates | region_size. Dummies come
  // first so a collinear covariate (region_size always is) gets dropped rather
  // than a region term.
  const std::size_t p = 1 + r + sample_covariates.size() + 1;
  Matrix design(rows, p);
  Vector response(rows);
  std::vector<std::string> names;
  names.push_back("intercept");
  for (const auto& name : result.region_names) names.push_back("region:" + name);
  for (const auto& [name, values] : sample_covariates) names.push_back(name);
  names.push_back("region_size");

  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t level = 0; level <= r; ++level) {
      design(row, 0) = 1.0;
      for (std::size_t reg = 0; reg < r; ++reg) {
        design(row, 1 + reg) = (level == reg + 1) ? 1.0 : 0.0;
      }
      for (std::size_t c = 0; c < sample_covariates.size(); ++c) {
        design(row, 1 + r + c) = sample_covariates[c].second[i];
      }
      design(row, p - 1) =
          level == 0 ? 0.0 : static_cast<double>(result.region_sizes[level - 1]);
      response[row] = result.bag_corrected(i, level);
      ++row;
    }
  }

  ContrastFit fit;
  fit.n_rows = rows;
  for (const auto& [name, values] : sample_covariates) fit.covariates.push_back(name);
  fit.covariates.push_back("region_size");

  const OlsFit ols = ols_fit_dropping(design, response, names, &fit.dropped_terms);
  fit.residual_dof = ols.dof();
  const double z975 = normal_quantile(0.975);
  for (std::size_t reg = 0; reg < r; ++reg) {
    RegionEffect effect;
    effect.region = result.region_names[reg];
    effect.estimate = ols.coefficients[1 + reg];
    effect.std_error = ols.std_errors[1 + reg];
    if (std::isfinite(effect.estimate) && effect.std_error > 0.0) {
      effect.ci_low = effect.estimate - z975 * effect.std_error;
      effect.ci_high = effect.estimate + z975 * effect.std_error;
      effect.p_value = t_two_sided_p(effect.estimate / effect.std_error,
                                     static_cast<double>(ols.dof()));
    } else {
      effect.ci_low = effect.ci_high = effect.estimate;
      effect.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    fit.regions.push_back(std::move(effect));
  }
  return fit;
}

std::string contrast_fit_json(const ContrastFit& fit) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& region : fit.regions) {
    regions.push_back({{"region", region.region},
                       {"estimate", region.estimate},
                       {"std_error", region.std_error},
                       {"ci_low", region.ci_low},
                       {"ci_high", region.ci_high},
                       {"p", region.p_value}});
  }
  nlohmann::json j{{"reference", kNoOcclusionLabel},
                   {"n_rows", fit.n_rows},
                   {"residual_dof", fit.residual_dof},
                   {"covariates", fit.covariates},
                   {"dropped_terms", fit.dropped_terms},
                   {"regions", regions}};
  return j.dump(2) + "\n";
}

std::string contrast_fit_table(const ContrastFit& fit) {
  std::ostringstream out;
  out << "region contrasts vs '" << kNoOcclusionLabel << "' (rows=" << fit.n_rows << ")\n";
  for (const auto& w : fit.dropped_terms) out << "warning: " << w << "\n";
  out << "region                          estimate   std_error          p\n";
  for (const auto& region : fit.regions) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-28s %+10.4g  %10.4g  %9.3g\n", region.region.c_str(),
                  region.estimate, region.std_error, region.p_value);
    out << buf;
  }
  return out.str();
}

std::string occlusion_long_csv(const OcclusionResult& result,
                               const std::vector<std::pair<std::string, Vector>>&
                                   sample_covariates) {
  check_sample_covariates(result, sample_covariates);
  std::string out = "sample_id,region,region_size,bag_corrected";
  for (const auto& [name, values] : sample_covariates) out += "," + name;
  out += '\n';
  const std::size_t r = result.region_names.size();
  for (std::size_t i = 0; i < result.samples(); ++i) {
    for (std::size_t level = 0; level <= r; ++level) {
      out += std::to_string(i);
      out += ',';
      out += level == 0 ? kNoOcclusionLabel : result.region_names[level - 1];
      out += ',';
      out += std::to_string(level == 0 ? 0 : result.region_sizes[level - 1]);
      out += ',';
      out += format_double(result.bag_corrected(i, level));
      for (const auto& [name, values] : sample_covariates) {
        out += ',';
        out += format_double(values[i]);
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace mccqr
