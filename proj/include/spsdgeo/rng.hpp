#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Seeded generator with fully specified draw algorithms. std::mt19937_64 is
// pinned by the standard, but the library distributions are not, so normals
// and bounded integers are derived here to keep outputs identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (polar-free, pair-cached).
  double normal();

  // Uniform integer in [0, n) by rejection.
  std::uint64_t index(std::uint64_t n);

  // k distinct indices from [0, n), in increasing order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

  Matrix gaussian(int rows, int cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Haar-ish random frame: thin QR of a Gaussian with positive diagonal fix.
Matrix random_frame(Rng& rng, int d, int r);

// Random orthogonal d-by-d matrix.
Matrix random_orthogonal(Rng& rng, int d);

// Random symmetric matrix with entries scaled by `scale`.
Matrix random_symmetric(Rng& rng, int dim, double scale);

// Random SPD matrix exp(S) with S = random_symmetric(dim, scale).
Matrix random_spd(Rng& rng, int dim, double scale);

}  // namespace spsdgeo
