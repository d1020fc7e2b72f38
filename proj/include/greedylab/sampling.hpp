#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "greedylab/enumeration.hpp"

namespace greedylab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent per-instance seeds so that
/// instance i of a suite does not depend on how many draws earlier
/// instances consumed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::vector<double> gaussian_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = normal(rng);
  return out;
}

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform k-subset of {0..n-1}, sorted.
inline IndexSet random_subset(Rng& rng, std::size_t n, std::size_t k) {
  IndexSet all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(all[i], all[uniform_index(rng, i, n - 1)]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

inline std::vector<int> random_signs(Rng& rng, std::size_t k) {
  std::bernoulli_distribution coin(0.5);
  std::vector<int> out(k);
  for (auto& s : out) s = coin(rng) ? 1 : -1;
  return out;
}

}  // namespace greedylab
