#include "mccqr/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace mccqr {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void check_levels(const Vector& levels) {
  double prev = 0.0;
  for (double level : levels) {
    if (!(level > 0.0 && level < 1.0)) {
      throw InvalidArgument("picp: level must lie in (0, 1)");
    }
    if (level <= prev) throw InvalidArgument("picp: levels must be strictly increasing");
    prev = level;
  }
}

}  // namespace

double empirical_quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("empirical_quantile: p outside [0, 1]");
  if (sorted.size() == 1) return sorted[0];
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double picp(const std::vector<PredictiveDistribution>& dists, const Vector& y, double level) {
  if (dists.empty() || dists.size() != y.size()) {
    throw InvalidArgument("picp: need equally many distributions and targets, >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("picp: level must lie in (0, 1)");
  std::size_t covered = 0;
  Vector sorted;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    sorted = dists[i].draws;
    std::sort(sorted.begin(), sorted.end());
    const double lo = empirical_quantile_sorted(sorted, (1.0 - level) / 2.0);
    const double hi = empirical_quantile_sorted(sorted, (1.0 + level) / 2.0);
    if (y[i] >= lo && y[i] <= hi) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(dists.size());
}

CalibrationReport picp_curve(const std::vector<PredictiveDistribution>& dists,
                             const Vector& y, const Vector& levels, double crossing) {
  if (dists.empty() || dists.size() != y.size()) {
    throw InvalidArgument("picp_curve: need equally many distributions and targets, >= 1");
  }
  check_levels(levels);

  CalibrationReport report;
  report.levels = levels;
  report.n = dists.size();
  report.crossing_rate = crossing;

  // Sort each sample's draws once, then read every level off the same order
  // statistics; nested central intervals make picp non-decreasing in level.
  report.picp.assign(levels.size(), 0.0);
  Vector sorted;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    sorted = dists[i].draws;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double lo = empirical_quantile_sorted(sorted, (1.0 - levels[l]) / 2.0);
      const double hi = empirical_quantile_sorted(sorted, (1.0 + levels[l]) / 2.0);
      if (y[i] >= lo && y[i] <= hi) report.picp[l] += 1.0;
    }
  }
  for (auto& v : report.picp) v /= static_cast<double>(dists.size());

  Vector medians(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) medians[i] = dists[i].median;
  report.mae_median = median_abs_error(y, medians);
  return report;
}

Vector default_levels() {
  Vector levels;
  for (int i = 1; i <= 19; ++i) levels.push_back(static_cast<double>(i) * 0.05);
  return levels;
}

double crossing_rate(const MccqrModel& model, const Matrix& x) {
  if (x.rows() == 0) throw InvalidArgument("crossing_rate: empty input");
  const std::size_t k = model.grid().size();
  if (k < 2) return 0.0;
  std::size_t crossings = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const Vector heads = forward_heads(model, x.row(i));
    for (std::size_t j = 0; j + 1 < k; ++j) {
      if (heads[j + 1] < heads[j] - 1e-12) ++crossings;
    }
  }
  return static_cast<double>(crossings) /
         (static_cast<double>(k - 1) * static_cast<double>(x.rows()));
}

double median_abs_error(const Vector& y_true, const Vector& y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw InvalidArgument("median_abs_error: need equal-length non-empty vectors");
  }
  Vector abs_err(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    abs_err[i] = std::fabs(y_true[i] - y_pred[i]);
  }
  return median(std::move(abs_err));
}

double interval_coverage(const Vector& y, const Vector& lo, const Vector& hi) {
  if (y.empty() || y.size() != lo.size() || y.size() != hi.size()) {
    throw InvalidArgument("interval_coverage: need equal-length non-empty vectors");
  }
  std::size_t covered = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= lo[i] && y[i] <= hi[i]) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(y.size());
}

std::vector<GroupMae> mae_by_group(const Vector& y_true, const Vector& y_pred,
                                   const Vector& group) {
  if (y_true.size() != y_pred.size() || y_true.size() != group.size() || y_true.empty()) {
    throw InvalidArgument("mae_by_group: need equal-length non-empty vectors");
  }
  Vector keys = group;
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<GroupMae> out;
  for (double key : keys) {
    Vector yt, yp;
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (group[i] == key) {
        yt.push_back(y_true[i]);
        yp.push_back(y_pred[i]);
      }
    }
    GroupMae g;
    g.group = key;
    g.n = yt.size();
    g.mae_median = median_abs_error(yt, yp);
    const double sd = population_std(yt);
    g.mae_std_ratio = sd > 0.0 ? g.mae_median / sd : std::numeric_limits<double>::quiet_NaN();
    out.push_back(g);
  }
  return out;
}

std::string calibration_csv(const CalibrationReport& report) {
  std::string out = "level,picp\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    out += format_double(report.levels[i]);
    out += ',';
    out += format_double(report.picp[i]);
    out += '\n';
  }
  return out;
}

CalibrationReport calibration_from_csv(const std::string& text) {
  CalibrationReport report;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "level,picp") {
    throw DataError("calibration csv: missing 'level,picp' header");
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DataError("calibration csv: row " + std::to_string(row) + " has no comma");
    }
    double level = 0.0, cov = 0.0;
    auto r1 = std::from_chars(line.data(), line.data() + comma, level);
    auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), cov);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
      throw DataError("calibration csv: row " + std::to_string(row) + " is not numeric");
    }
    report.levels.push_back(level);
    report.picp.push_back(cov);
  }
  return report;
}

std::string calibration_table(const CalibrationReport& report) {
  std::ostringstream out;
  out << "level   picp\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%5.3f   %5.3f\n", report.levels[i], report.picp[i]);
    out << buf;
  }
  out << "n=" << report.n;
  if (std::isfinite(report.crossing_rate)) out << "  crossing_rate=" << report.crossing_rate;
  if (std::isfinite(report.mae_median)) out << "  mae_median=" << report.mae_median;
  out << "\n";
  return out.str();
}

std::string calibration_svg(const CalibrationReport& report) {
  // 480x480 canvas, 60px margins, unit square mapped to the plot area.
  constexpr double kSize = 480.0, kMargin = 60.0;
  const double span = kSize - 2.0 * kMargin;
  auto px = [&](double u) { return kMargin + u * span; };
  auto py = [&](double u) { return kSize - kMargin - u * span; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
         "viewBox=\"0 0 480 480\">\n";
  svg << "  <rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  svg << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
      << py(0) << "\" stroke=\"black\"/>\n";
  svg << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\""
      << py(1) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double u = i * 0.25;
    svg << "  <text x=\"" << px(u) << "\" y=\"" << py(0) + 24 << "\" font-size=\"12\" "
        << "text-anchor=\"middle\">" << u << "</text>\n";
    svg << "  <text x=\"" << px(0) - 10 << "\" y=\"" << py(u) + 4 << "\" font-size=\"12\" "
        << "text-anchor=\"end\">" << u << "</text>\n";
  }
  svg << "  <text x=\"" << px(0.5) << "\" y=\"" << kSize - 12
      << "\" font-size=\"14\" text-anchor=\"middle\">nominal level</text>\n";
  svg << "  <text x=\"16\" y=\"" << py(0.5)
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << py(0.5)
      << ")\">empirical PICP</text>\n";
  // Identity reference: optimal calibration.
  svg << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
      << py(1) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    if (i) svg << ' ';
    svg << px(report.levels[i]) << ',' << py(report.picp[i]);
  }
  svg << "\"/>\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    svg << "  <circle cx=\"" << px(report.levels[i]) << "\" cy=\"" << py(report.picp[i])
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mccqr
