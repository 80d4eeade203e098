#include "mccqr/rng.hpp"

#include <cmath>
#include <numbers>

#include "mccqr/common.hpp"

namespace mccqr {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::vector<double> Rng::uniform(std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = uniform();
  return out;
}

void Rng::fill_normal(std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); i += 2) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(angle);
    if (i + 1 < out.size()) out[i + 1] = r * std::sin(angle);
  }
}

std::vector<double> Rng::normal(std::size_t n) {
  std::vector<double> out(n);
  fill_normal(out);
  return out;
}

void Rng::fill_bernoulli_mask(std::span<double> out, double p_drop) {
  if (!(p_drop >= 0.0 && p_drop < 1.0)) {
    throw InvalidArgument("bernoulli_mask: p_drop must lie in [0, 1), got " +
                          std::to_string(p_drop));
  }
  for (auto& v : out) v = uniform() < p_drop ? 0.0 : 1.0;
}

std::vector<double> Rng::bernoulli_mask(std::size_t n, double p_drop) {
  std::vector<double> out(n);
  fill_bernoulli_mask(out, p_drop);
  return out;
}

Rng Rng::split() { return Rng(next_u64()); }

std::vector<Rng> Rng::split(std::size_t k) {
  std::vector<Rng> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(split());
  return out;
}

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(indices[i - 1], indices[j]);
  }
}

std::vector<std::size_t> kfold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw InvalidArgument("kfold_assignment: need 2 <= k <= n, got k=" + std::to_string(k) +
                          ", n=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle_indices(order, rng);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos % k;
  return fold_of;
}

}  // namespace mccqr
