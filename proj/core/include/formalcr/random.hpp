#pragma once

#include <cstdint>
#include <random>

namespace formalcr {

/// Seeded generator with a platform-independent integer mapping, so reports
/// are reproducible across standard libraries (std distributions are not).
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform-ish integer in [lo, hi] (modulo bias is irrelevant here).
  long uniform(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(eng_() % span);
  }

  bool coin() { return (eng_() >> 17) & 1u; }

private:
  std::mt19937_64 eng_;
};

/// Derives an independent stream seed from a base seed and a label.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (label + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace formalcr
