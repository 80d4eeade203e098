#include "mccqr/synthetic.hpp"

#include <cmath>

#include "mccqr/common.hpp"
#include "mccqr/stats.hpp"

namespace mccqr {

namespace {

double hetero_mean(SyntheticFamily family, double x) {
  return family == SyntheticFamily::LinearHetero ? 1.0 + 2.0 * x : std::sin(2.0 * x);
}

double hetero_spread(SyntheticFamily family, double x, double noise_scale) {
  return family == SyntheticFamily::LinearHetero ? noise_scale * (0.5 + 0.4 * x)
                                                 : noise_scale * (0.3 + 0.2 * x);
}

// Centered age basis used by the AgeLike projection.
void age_basis(double age, double basis[3]) {
  const double a = (age - 46.0) / 15.0;
  basis[0] = a;
  basis[1] = a * a;
  basis[2] = std::sin(age);
}

}  // namespace

SyntheticFamily synthetic_family_from_name(const std::string& name) {
  if (name == "linear-hetero") return SyntheticFamily::LinearHetero;
  if (name == "sine-hetero") return SyntheticFamily::SineHetero;
  if (name == "age-like") return SyntheticFamily::AgeLike;
  throw InvalidArgument("unknown synthetic family '" + name +
                        "' (expected linear-hetero, sine-hetero or age-like)");
}

std::string synthetic_family_name(SyntheticFamily family) {
  switch (family) {
    case SyntheticFamily::LinearHetero: return "linear-hetero";
    case SyntheticFamily::SineHetero: return "sine-hetero";
    case SyntheticFamily::AgeLike: return "age-like";
  }
  throw InvalidArgument("unknown synthetic family");
}

double SyntheticData::oracle_quantile_at(double signal_value, double tau) const {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("oracle_quantile: tau must lie in (0, 1)");
  }
  if (spec.family == SyntheticFamily::AgeLike) return signal_value;
  return hetero_mean(spec.family, signal_value) +
         hetero_spread(spec.family, signal_value, spec.noise_scale) * normal_quantile(tau);
}

double SyntheticData::oracle_quantile(std::size_t row, double tau) const {
  if (row >= signal.size()) throw InvalidArgument("oracle_quantile: row out of range");
  return oracle_quantile_at(signal[row], tau);
}

SyntheticData generate(const SyntheticSpec& spec, Rng& rng) {
  if (spec.n < 1) throw InvalidArgument("generate: n must be >= 1");
  if (spec.d < 1) throw InvalidArgument("generate: d must be >= 1");
  if (!(spec.noise_scale >= 0.0)) throw InvalidArgument("generate: noise_scale must be >= 0");

  SyntheticData data;
  data.spec = spec;
  data.x = Matrix(spec.n, spec.d);
  data.y.resize(spec.n);
  data.signal.resize(spec.n);

  if (spec.family == SyntheticFamily::AgeLike) {
    // One fixed projection per dataset, then per-sample feature noise.
    Matrix projection(spec.d, 3);
    rng.fill_normal(projection.data());
    Vector noise(spec.d);
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double age = 20.0 + 52.0 * rng.uniform();
      data.signal[i] = age;
      data.y[i] = age;
      double basis[3];
      age_basis(age, basis);
      rng.fill_normal(noise);
      for (std::size_t j = 0; j < spec.d; ++j) {
        data.x(i, j) = projection(j, 0) * basis[0] + projection(j, 1) * basis[1] +
                       projection(j, 2) * basis[2] + spec.noise_scale * noise[j];
      }
    }
    return data;
  }

  Vector eps(1);
  Vector extra(spec.d > 1 ? spec.d - 1 : 0);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double x = 2.0 * rng.uniform();
    rng.fill_normal(eps);
    data.signal[i] = x;
    data.x(i, 0) = x;
    data.y[i] = hetero_mean(spec.family, x) +
                hetero_spread(spec.family, x, spec.noise_scale) * eps[0];
    if (!extra.empty()) {
      rng.fill_normal(extra);
      for (std::size_t j = 1; j < spec.d; ++j) data.x(i, j) = extra[j - 1];
    }
  }
  return data;
}

SyntheticData generate(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  return generate(spec, rng);
}

}  // namespace mccqr
