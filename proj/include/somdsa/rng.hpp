#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace somdsa {

// Seeded RNG built on std::mt19937_64, whose output stream is fully pinned
// by the standard. Bounded draws use a 128-bit multiply instead of
// std::uniform_int_distribution, which is implementation-defined; this keeps
// identical seeds producing identical runs across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // uniform in [0, n), n > 0
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // uniform integer in [lo, hi], inclusive
  int int_in(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi) - lo + 1));
  }

  // uniform double in [0, 1)
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace somdsa
