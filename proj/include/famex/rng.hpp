#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace famex {

// Combines a master seed with a stream index (fold, trial, iteration...).
// Derived seeds depend only on their inputs, never on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

template <typename... Streams>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, Streams... rest) {
  return derive_seed(derive_seed(seed, stream), static_cast<std::uint64_t>(rest)...);
}

// Portable wrapper around mt19937_64. The standard distributions are
// implementation-defined, so bounded integers and shuffles are done here
// to keep results bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Uniform in [0, 1).
  double uniform();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace famex
