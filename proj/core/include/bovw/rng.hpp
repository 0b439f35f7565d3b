#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace bovw {

/// Seeded generator whose draws are identical on every platform.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// std distributions are not, so bounded and real-valued draws are
/// derived here from the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal deviate (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixes a base seed with a stream index so derived generators are decorrelated.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace bovw
