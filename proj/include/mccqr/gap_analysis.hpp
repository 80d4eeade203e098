#pragma once

#include <map>
#include <string>
#include <vector>

#include "mccqr/predict.hpp"

namespace mccqr {

// One evaluated sample: truth, point prediction, predictive spread, the raw
// gap and the uncertainty-corrected gap (gap / sigma), plus named covariates.
struct GapRecord {
  double y_true = 0.0;
  double y_pred = 0.0;
  double sigma = 0.0;
  double bag = 0.0;            // y_pred - y_true
  double bag_corrected = 0.0;  // bag / sigma
  std::map<std::string, double> covariates;
};

GapRecord make_gap_record(double y_true, double y_pred, double sigma);

std::vector<GapRecord> compute_gaps(const std::vector<PredictiveDistribution>& dists,
                                    const Vector& y,
                                    const std::vector<std::pair<std::string, Vector>>&
                                        covariates = {});

struct OlsFit {
  Vector coefficients;  // aligned with design columns
  Vector std_errors;
  double rss = 0.0;
  std::size_t n = 0;
  std::size_t p = 0;  // residual dof = n - p

  std::size_t dof() const { return n - p; }
};

// Least squares via Householder QR, exact on full-rank input. The design must
// already contain its intercept column. Rank deficiency throws NumericError
// naming the dependent column indices (left-to-right convention: a column is
// dependent when the earlier columns already span it).
OlsFit ols_fit(const Matrix& design, const Vector& response);

// Same, but drops dependent columns instead of throwing; dropped names are
// appended to warnings and get NaN coefficients in the result (aligned with
// the original design).
OlsFit ols_fit_dropping(const Matrix& design, const Vector& response,
                        const std::vector<std::string>& column_names,
                        std::vector<std::string>* warnings);

struct AssociationStats {
  double estimate = 0.0;  // predictor coefficient in the full model
  double f_stat = 0.0;    // partial F for the predictor
  double p_value = 1.0;
  double partial_eta_sq = 0.0;
  std::size_t df1 = 1;
  std::size_t df2 = 0;
};

struct AssociationResult {
  std::string predictor;
  std::vector<std::string> covariates;  // as used, including auto-added age
  std::size_t n = 0;
  AssociationStats on_bag;
  AssociationStats on_bag_corrected;
};

// Partial F-test for `predictor` on bag and on bag_corrected, controlling for
// the given covariates. A covariate named "age" is always included when the
// records carry one (unless it is the predictor itself).
AssociationResult association_test(const std::vector<GapRecord>& records,
                                   const std::string& predictor,
                                   const std::vector<std::string>& covariates);

std::string association_json(const AssociationResult& result);
std::string association_table(const AssociationResult& result);

}  // namespace mccqr
