#pragma once

#include <cstdint>
#include <string>

#include "mccqr/linalg.hpp"
#include "mccqr/rng.hpp"

namespace mccqr {

// Generator families with closed-form conditional quantiles.
//   LinearHetero: x ~ U(0,2); y = 1 + 2x + s*(0.5 + 0.4x)*eps
//   SineHetero:   x ~ U(0,2); y = sin(2x) + s*(0.3 + 0.2x)*eps
//   AgeLike:      age ~ U(20,72); features are a fixed random projection of
//                 (age, age^2, sin age) plus feature noise; y = age
// with eps ~ N(0,1) and s the noise_scale. For the first two families,
// feature 0 carries the signal and any further columns are pure N(0,1) noise.
enum class SyntheticFamily { LinearHetero, SineHetero, AgeLike };

struct SyntheticSpec {
  SyntheticFamily family = SyntheticFamily::LinearHetero;
  std::size_t n = 1000;
  std::size_t d = 1;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

SyntheticFamily synthetic_family_from_name(const std::string& name);
std::string synthetic_family_name(SyntheticFamily family);

// Generated dataset plus its quantile oracle. `signal` holds the latent value
// that determines each row's conditional distribution (the x value, or the
// age for AgeLike).
struct SyntheticData {
  SyntheticSpec spec;
  Matrix x;
  Vector y;
  Vector signal;

  // Closed-form q*(tau | signal). AgeLike targets are deterministic given the
  // latent age, so its quantile function is flat in tau.
  double oracle_quantile_at(double signal_value, double tau) const;
  double oracle_quantile(std::size_t row, double tau) const;
};

SyntheticData generate(const SyntheticSpec& spec, Rng& rng);
// Convenience: fresh Rng(spec.seed).
SyntheticData generate(const SyntheticSpec& spec);

}  // namespace mccqr
