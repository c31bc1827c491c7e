#pragma once

#include <cstdint>
#include <random>

namespace wg {

// mt19937_64 with hand-rolled distributions. std::uniform_real_distribution is
// implementation-defined, which would break cross-toolchain reproducibility of
// seeded meshes and test data; the raw generator sequence is pinned by the
// standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace wg
