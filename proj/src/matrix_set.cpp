#include "spsdgeo/matrix_set.hpp"

#include "spsdgeo/errors.hpp"

namespace spsdgeo {

std::vector<Matrix> MatrixSet::compose_all() const {
  if (storage == Storage::Dense) return dense;
  std::vector<Matrix> out;
  out.reserve(factored.size());
  for (const SpsdPoint& x : factored) out.push_back(spsd_compose(x));
  return out;
}

MatrixSet MatrixSet::from_dense(std::vector<Matrix> items,
                                std::optional<std::vector<int>> labels) {
  MatrixSet out;
  out.storage = Storage::Dense;
  out.dense = std::move(items);
  out.labels = std::move(labels);
  if (!out.dense.empty()) out.d = static_cast<int>(out.dense.front().rows());
  if (out.labels && out.labels->size() != out.dense.size())
    throw LengthMismatch("MatrixSet: label count differs from item count");
  return out;
}

MatrixSet MatrixSet::from_factored(std::vector<SpsdPoint> items,
                                   std::optional<std::vector<int>> labels) {
  MatrixSet out;
  out.storage = Storage::Factored;
  out.factored = std::move(items);
  out.labels = std::move(labels);
  if (!out.factored.empty()) {
    out.d = out.factored.front().dim();
    out.r = out.factored.front().rank();
  }
  if (out.labels && out.labels->size() != out.factored.size())
    throw LengthMismatch("MatrixSet: label count differs from item count");
  return out;
}

}  // namespace spsdgeo
