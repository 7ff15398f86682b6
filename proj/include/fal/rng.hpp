#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace fal {

/// The single named generator used everywhere. Distribution helpers below are
/// written out by hand because the std:: distributions are implementation
/// defined, and run outputs must be byte-identical for a given seed.
using Rng = std::mt19937_64;

/// Independent stream `stream` derived from `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Uniform integer in [0, n). Requires n > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Standard normal draw (Box-Muller, one value per call).
double standard_normal(Rng& rng);

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace fal
