#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tsift {

// Seeded generator with explicit draw helpers. All randomized operations in
// the library go through this so outputs are identical across platforms and
// standard-library versions (std::shuffle and std::*_distribution are not
// portable under a fixed seed).
class det_rng {
 public:
  explicit det_rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Uniform in [0,1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

} // namespace tsift
