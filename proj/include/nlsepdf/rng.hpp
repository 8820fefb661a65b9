#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nlsepdf/grid.hpp"

namespace nlsepdf {

/// splitmix64 finalizer; maps (seed, stream) pairs to decorrelated engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Random stream identified by (seed, stream id). Work is split into
/// numbered streams rather than per-thread engines, so results do not depend
/// on the thread count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Circular complex Gaussian with E|z|^2 = variance.
  cplx complex_normal(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace nlsepdf
