#pragma once

#include <optional>
#include <vector>

#include "spsdgeo/spsd.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Tangent vectors of one or more sets taken at a shared base point.
struct TangentBatch {
  SpsdPoint base;
  std::vector<SpsdTangent> items;

  int vector_dim() const {
    const int d = base.dim();
    const int r = base.rank();
    return d * r + r * r;
  }
};

// Logs every item at `base`; when base is omitted it is the mean of the
// union of the sets.
TangentBatch embed_set(const std::vector<std::vector<SpsdPoint>>& sets,
                       const std::optional<SpsdPoint>& base = std::nullopt,
                       const MeanConfig& mean_cfg = {});

// Stacks each tangent pair into a single row [vec(delta), k * vec(sym)].
// With no fixed k, k is chosen so the pooled entry standard deviations of
// the two blocks match (population form). whiten_spd swaps sym for its
// whitened version at the base core before stacking.
struct VectorizeResult {
  Matrix vectors;  // one row per item
  double k_used = 1.0;
};

VectorizeResult vectorize(const TangentBatch& batch,
                          std::optional<double> fixed_k = std::nullopt,
                          bool whiten_spd = false);

struct PcaModel {
  Vector mean;
  Matrix basis;  // D-by-m, orthonormal columns
  int components = 0;
  double k_used = 1.0;
};

// Principal directions of mean-centered row vectors.
PcaModel pca_fit(const Matrix& vectors, int components);

// Scores (v - mean)^T basis, one row per input row.
Matrix pca_apply(const PcaModel& model, const Matrix& vectors);

}  // namespace spsdgeo
