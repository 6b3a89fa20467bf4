#pragma once

#include <cmath>
#include <cstdint>

#include "doctest.h"

// Absolute-tolerance check with a readable failure message.
#define CHECK_NEAR(a, b, tol)                                                     \
  do {                                                                            \
    const double va_ = (a), vb_ = (b), vt_ = (tol);                               \
    INFO("CHECK_NEAR: ", #a, " = ", va_, " vs ", #b, " = ", vb_, " (tol ", vt_,   \
         ", diff ", std::fabs(va_ - vb_), ")");                                   \
    CHECK(std::fabs(va_ - vb_) <= vt_);                                           \
  } while (0)

namespace krf_test {

// Deterministic, platform-independent uniform generator for tests.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t s_;
};

}  // namespace krf_test
