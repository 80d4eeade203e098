#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mccqr {

// xoshiro256++ seeded through splitmix64. Identical seed gives an identical
// stream on every platform. A state is single-owner: parallel work takes
// split() children, never a shared instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform integer in [0, bound) via multiply-shift range reduction.
  std::uint64_t below(std::uint64_t bound);
  // Uniform real in [0, 1) with 53 random bits.
  double uniform();
  std::vector<double> uniform(std::size_t n);

  // Standard normals via Box-Muller; each pair of uniforms yields two values
  // and a trailing odd value discards its partner, so the stream position
  // after a call depends only on n.
  std::vector<double> normal(std::size_t n);
  void fill_normal(std::span<double> out);

  // Entries are 0 with probability p_drop, else 1. Requires 0 <= p_drop < 1.
  std::vector<double> bernoulli_mask(std::size_t n, double p_drop);
  void fill_bernoulli_mask(std::span<double> out, double p_drop);

  // Child stream seeded by one draw from this stream.
  Rng split();
  std::vector<Rng> split(std::size_t k);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  std::array<std::uint64_t, 4> state_{};
};

// In-place Fisher-Yates shuffle driven by rng.below().
void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng);

// Deterministic k-fold assignment: a seeded shuffle of 0..n-1 dealt round
// robin into k folds. fold_of[i] is the fold of sample i.
std::vector<std::size_t> kfold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace mccqr
