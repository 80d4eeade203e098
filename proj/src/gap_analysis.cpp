#include "mccqr/gap_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "mccqr/stats.hpp"

namespace mccqr {

GapRecord make_gap_record(double y_true, double y_pred, double sigma) {
  if (!(sigma > 0.0)) {
    throw InvalidArgument("gap record: sigma must be > 0 (got " + std::to_string(sigma) +
                          "); a zero spread signals a degenerate predictive distribution");
  }
  GapRecord rec;
  rec.y_true = y_true;
  rec.y_pred = y_pred;
  rec.sigma = sigma;
  rec.bag = y_pred - y_true;
  rec.bag_corrected = rec.bag / sigma;
  return rec;
}

std::vector<GapRecord> compute_gaps(const std::vector<PredictiveDistribution>& dists,
                                    const Vector& y,
                                    const std::vector<std::pair<std::string, Vector>>&
                                        covariates) {
  if (dists.size() != y.size()) {
    throw InvalidArgument("compute_gaps: " + std::to_string(dists.size()) +
                          " distributions vs " + std::to_string(y.size()) + " targets");
  }
  for (const auto& [name, values] : covariates) {
    if (values.size() != y.size()) {
      throw InvalidArgument("compute_gaps: covariate '" + name + "' has " +
                            std::to_string(values.size()) + " entries, expected " +
                            std::to_string(y.size()));
    }
  }
  std::vector<GapRecord> records;
  records.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    GapRecord rec = make_gap_record(y[i], dists[i].median, dists[i].std_dev);
    for (const auto& [name, values] : covariates) rec.covariates[name] = values[i];
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

// Householder QR with the response carried along. On return `a` holds R in
// its upper triangle and `y` holds Q^T y.
void householder_qr_inplace(Matrix& a, Vector& y) {
  const std::size_t n = a.rows();
  const std::size_t p = a.cols();
  Vector v(n);
  for (std::size_t j = 0; j < p && j < n; ++j) {
    double sigma = 0.0;
    for (std::size_t i = j + 1; i < n; ++i) sigma += a(i, j) * a(i, j);
    const double x0 = a(j, j);
    if (sigma == 0.0) continue;  // column already triangular below the pivot
    const double mu = std::sqrt(x0 * x0 + sigma);
    const double v0 = x0 <= 0.0 ? x0 - mu : -sigma / (x0 + mu);
    const double beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    v[j] = 1.0;
    for (std::size_t i = j + 1; i < n; ++i) v[i] = a(i, j) / v0;

    for (std::size_t c = j; c < p; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i] * a(i, c);
      const double f = beta * dot;
      for (std::size_t i = j; i < n; ++i) a(i, c) -= f * v[i];
    }
    double dot = 0.0;
    for (std::size_t i = j; i < n; ++i) dot += v[i] * y[i];
    const double f = beta * dot;
    for (std::size_t i = j; i < n; ++i) y[i] -= f * v[i];
  }
}

std::vector<std::size_t> dependent_columns(const Matrix& r, const Vector& colnorms,
                                           double tol) {
  std::vector<std::size_t> dependent;
  for (std::size_t j = 0; j < r.cols(); ++j) {
    const double pivot = j < r.rows() ? std::fabs(r(j, j)) : 0.0;
    if (pivot <= tol * std::max(colnorms[j], 1.0)) dependent.push_back(j);
  }
  return dependent;
}

OlsFit solve_from_qr(const Matrix& r, const Vector& qty, std::size_t n) {
  const std::size_t p = r.cols();
  OlsFit fit;
  fit.n = n;
  fit.p = p;
  fit.coefficients.assign(p, 0.0);
  for (std::size_t jj = p; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t c = jj + 1; c < p; ++c) s -= r(jj, c) * fit.coefficients[c];
    fit.coefficients[jj] = s / r(jj, jj);
  }
  fit.rss = 0.0;
  for (std::size_t i = p; i < n; ++i) fit.rss += qty[i] * qty[i];

  // diag of (X^T X)^{-1} via forward solves R^T z = e_j.
  fit.std_errors.assign(p, 0.0);
  const double sigma_sq = fit.dof() > 0 ? fit.rss / static_cast<double>(fit.dof()) : 0.0;
  Vector z(p);
  for (std::size_t j = 0; j < p; ++j) {
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = j; i < p; ++i) {
      double s = i == j ? 1.0 : 0.0;
      for (std::size_t c = j; c < i; ++c) s -= r(c, i) * z[c];
      z[i] = s / r(i, i);
    }
    double nsq = 0.0;
    for (std::size_t i = j; i < p; ++i) nsq += z[i] * z[i];
    fit.std_errors[j] = std::sqrt(sigma_sq * nsq);
  }
  return fit;
}

constexpr double kRankTol = 1e-10;

void check_design(const Matrix& design, const Vector& response) {
  if (design.rows() == 0 || design.cols() == 0) throw InvalidArgument("ols: empty design");
  if (response.size() != design.rows()) {
    throw InvalidArgument("ols: response length does not match design rows");
  }
  if (design.rows() <= design.cols()) {
    throw InvalidArgument("ols: need more rows than columns (n=" +
                          std::to_string(design.rows()) + ", p=" +
                          std::to_string(design.cols()) + ")");
  }
  if (!all_finite(design.data()) || !all_finite(response)) {
    throw DataError("ols: non-finite values in design or response");
  }
}

Vector column_norms(const Matrix& m) {
  Vector norms(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) norms[j] += m(i, j) * m(i, j);
  }
  for (auto& v : norms) v = std::sqrt(v);
  return norms;
}

}  // namespace

OlsFit ols_fit(const Matrix& design, const Vector& response) {
  check_design(design, response);
  Matrix r = design;
  Vector qty = response;
  const Vector norms = column_norms(design);
  householder_qr_inplace(r, qty);
  const auto dependent = dependent_columns(r, norms, kRankTol);
  if (!dependent.empty()) {
    std::string cols;
    for (std::size_t j : dependent) {
      if (!cols.empty()) cols += ", ";
      cols += std::to_string(j);
    }
    throw NumericError("ols: design is rank deficient; column(s) " + cols +
                       " depend on earlier columns");
  }
  return solve_from_qr(r, qty, design.rows());
}

OlsFit ols_fit_dropping(const Matrix& design, const Vector& response,
                        const std::vector<std::string>& column_names,
                        std::vector<std::string>* warnings) {
  check_design(design, response);
  if (column_names.size() != design.cols()) {
    throw InvalidArgument("ols: column_names size does not match design");
  }

  std::vector<std::size_t> kept(design.cols());
  for (std::size_t j = 0; j < design.cols(); ++j) kept[j] = j;

  Matrix current = design;
  while (true) {
    Matrix r = current;
    Vector qty = response;
    const Vector norms = column_norms(current);
    householder_qr_inplace(r, qty);
    const auto dependent = dependent_columns(r, norms, kRankTol);
    if (dependent.empty()) {
      OlsFit reduced = solve_from_qr(r, qty, current.rows());
      // Re-expand to the original column layout; dropped terms get NaN.
      OlsFit fit;
      fit.n = reduced.n;
      fit.p = reduced.p;
      fit.rss = reduced.rss;
      fit.coefficients.assign(design.cols(), std::numeric_limits<double>::quiet_NaN());
      fit.std_errors.assign(design.cols(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t j = 0; j < kept.size(); ++j) {
        fit.coefficients[kept[j]] = reduced.coefficients[j];
        fit.std_errors[kept[j]] = reduced.std_errors[j];
      }
      return fit;
    }
    // Drop the flagged columns and re-factor.
    std::vector<bool> drop(current.cols(), false);
    for (std::size_t j : dependent) {
      drop[j] = true;
      if (warnings) {
        warnings->push_back("dropped rank-deficient term '" + column_names[kept[j]] + "'");
      }
    }
    std::vector<std::size_t> new_kept;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (!drop[j]) new_kept.push_back(kept[j]);
    }
    if (new_kept.empty()) throw NumericError("ols: all columns rank deficient");
    Matrix next(current.rows(), new_kept.size());
    std::size_t out_col = 0;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (drop[j]) continue;
      for (std::size_t i = 0; i < current.rows(); ++i) next(i, out_col) = current(i, j);
      ++out_col;
    }
    current = std::move(next);
    kept = std::move(new_kept);
  }
}

namespace {

AssociationStats partial_f_test(const Matrix& full_design, const Vector& response,
                                std::size_t predictor_col) {
  const OlsFit full = ols_fit(full_design, response);

  Matrix reduced(full_design.rows(), full_design.cols() - 1);
  for (std::size_t i = 0; i < full_design.rows(); ++i) {
    std::size_t out = 0;
    for (std::size_t j = 0; j < full_design.cols(); ++j) {
      if (j == predictor_col) continue;
      reduced(i, out++) = full_design(i, j);
    }
  }
  const OlsFit red = ols_fit(reduced, response);

  AssociationStats stats;
  stats.estimate = full.coefficients[predictor_col];
  stats.df1 = 1;
  stats.df2 = full.dof();
  const double df2 = static_cast<double>(stats.df2);
  const double num = std::max(red.rss - full.rss, 0.0);
  const double denom = full.rss / df2;
  stats.f_stat = denom > 0.0 ? num / denom : 0.0;
  stats.p_value = f_survival(stats.f_stat, 1.0, df2);
  stats.partial_eta_sq = stats.f_stat / (stats.f_stat + df2);
  return stats;
}

}  // namespace

AssociationResult association_test(const std::vector<GapRecord>& records,
                                   const std::string& predictor,
                                   const std::vector<std::string>& covariates) {
  if (records.size() < 3) throw InvalidArgument("association_test: too few records");

  std::vector<std::string> used = covariates;
  const bool has_age = records.front().covariates.count("age") > 0;
  if (has_age && predictor != "age" &&
      std::find(used.begin(), used.end(), "age") == used.end()) {
    used.insert(used.begin(), "age");
  }

  auto covariate_value = [&](const GapRecord& rec, const std::string& name) {
    const auto it = rec.covariates.find(name);
    if (it == rec.covariates.end()) {
      throw InvalidArgument("association_test: covariate '" + name +
                            "' missing from records");
    }
    return it->second;
  };

  const std::size_t n = records.size();
  const std::size_t p = 2 + used.size();  // intercept + covariates + predictor
  Matrix design(n, p);
  Vector bag(n), bagc(n);
  for (std::size_t i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (std::size_t c = 0; c < used.size(); ++c) {
      design(i, 1 + c) = covariate_value(records[i], used[c]);
    }
    design(i, p - 1) = covariate_value(records[i], predictor);
    bag[i] = records[i].bag;
    bagc[i] = records[i].bag_corrected;
  }

  AssociationResult result;
  result.predictor = predictor;
  result.covariates = used;
  result.n = n;
  result.on_bag = partial_f_test(design, bag, p - 1);
  result.on_bag_corrected = partial_f_test(design, bagc, p - 1);
  return result;
}

namespace {

nlohmann::json stats_to_json(const std::string& term, const AssociationStats& s) {
  return nlohmann::json{{"term", term},          {"estimate", s.estimate},
                        {"F", s.f_stat},         {"df1", s.df1},
                        {"df2", s.df2},          {"p", s.p_value},
                        {"partial_eta_sq", s.partial_eta_sq}};
}

}  // namespace

std::string association_json(const AssociationResult& result) {
  nlohmann::json j{{"predictor", result.predictor},
                   {"covariates", result.covariates},
                   {"n", result.n},
                   {"bag", stats_to_json(result.predictor, result.on_bag)},
                   {"bag_corrected", stats_to_json(result.predictor, result.on_bag_corrected)}};
  return j.dump(2) + "\n";
}

std::string association_table(const AssociationResult& result) {
  std::ostringstream out;
  out << "association test: " << result.predictor << " (n=" << result.n << ")\n";
  out << "covariates:";
  if (result.covariates.empty()) out << " (none)";
  for (const auto& c : result.covariates) out << ' ' << c;
  out << "\n";
  auto line = [&](const char* label, const AssociationStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%-14s estimate=%+.6g  F(%zu,%zu)=%.4g  p=%.4g  partial_eta_sq=%.4g\n",
                  label, s.estimate, s.df1, s.df2, s.f_stat, s.p_value, s.partial_eta_sq);
    out << buf;
  };
  line("bag", result.on_bag);
  line("bag_corrected", result.on_bag_corrected);
  return out.str();
}

}  // namespace mccqr
