#pragma once

#include <cstdint>
#include <optional>

#include "spsdgeo/matrix_set.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Two-domain synthetic benchmark: labelled rank-r SPSD matrices around
// per-class prototypes, with the target domain distorted by a fixed
// subspace rotation and/or a fixed core congruence. Everything is driven by
// the seed.
struct SynthConfig {
  int d = 10;
  int r = 2;
  int classes = 2;
  int per_class = 10;
  std::uint64_t seed = 0;
  bool subspace_rotation = false;
  bool core_congruence = false;
  double noise_scale = 0.0;

  void validate() const;
};

struct SynthData {
  MatrixSet source;
  MatrixSet target;
  std::optional<Matrix> rotation;     // U applied as C -> U C U^T
  std::optional<Matrix> core_factor;  // E0 applied as P -> E0 P E0^T
};

SynthData synth_generate(const SynthConfig& cfg);

}  // namespace spsdgeo
