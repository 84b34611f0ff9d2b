#pragma once

#include <optional>
#include <vector>

#include "spsdgeo/spsd.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Ordered collection of SPSD matrices, either as dense d-by-d matrices or
// as structure pairs, with optional integer class labels.
struct MatrixSet {
  enum class Storage { Dense, Factored };

  Storage storage = Storage::Dense;
  int d = 0;
  int r = 0;  // meaningful for factored storage
  std::vector<Matrix> dense;
  std::vector<SpsdPoint> factored;
  std::optional<std::vector<int>> labels;

  std::size_t size() const {
    return storage == Storage::Dense ? dense.size() : factored.size();
  }

  Matrix compose(std::size_t i) const {
    return storage == Storage::Dense ? dense[i] : spsd_compose(factored[i]);
  }

  std::vector<Matrix> compose_all() const;

  static MatrixSet from_dense(std::vector<Matrix> items,
                              std::optional<std::vector<int>> labels = {});
  static MatrixSet from_factored(std::vector<SpsdPoint> items,
                                 std::optional<std::vector<int>> labels = {});
};

}  // namespace spsdgeo
