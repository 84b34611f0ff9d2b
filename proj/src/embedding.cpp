#include "spsdgeo/embedding.hpp"

#include <cmath>

#include "spsdgeo/batch.hpp"
#include "spsdgeo/errors.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

TangentBatch embed_set(const std::vector<std::vector<SpsdPoint>>& sets,
                       const std::optional<SpsdPoint>& base,
                       const MeanConfig& mean_cfg) {
  std::vector<SpsdPoint> all;
  for (const auto& set : sets) all.insert(all.end(), set.begin(), set.end());
  if (all.empty()) throw EmptySet("embed_set: no items");

  TangentBatch batch;
  batch.base = base ? *base : spsd_mean(all, mean_cfg);
  batch.items = batch::log_at(batch.base, all);
  return batch;
}

namespace {

// Population standard deviation over all entries of all matrices pooled.
double pooled_std(const std::vector<SpsdTangent>& items, bool spd_block) {
  double sum = 0.0;
  double count = 0.0;
  for (const SpsdTangent& t : items) {
    const Matrix& m = spd_block ? t.sym : t.delta;
    sum += m.sum();
    count += static_cast<double>(m.size());
  }
  const double mean = sum / count;
  double sq = 0.0;
  for (const SpsdTangent& t : items) {
    const Matrix& m = spd_block ? t.sym : t.delta;
    sq += (m.array() - mean).square().sum();
  }
  return std::sqrt(sq / count);
}

}  // namespace

VectorizeResult vectorize(const TangentBatch& batch,
                          std::optional<double> fixed_k, bool whiten_spd) {
  if (batch.items.empty()) throw EmptySet("vectorize: empty batch");
  const int d = batch.base.dim();
  const int r = batch.base.rank();
  const int dim = batch.vector_dim();

  std::vector<SpsdTangent> items = batch.items;
  if (whiten_spd) {
    const Matrix inv_root = spd_invsqrt(batch.base.core);
    for (SpsdTangent& t : items)
      t.sym = (inv_root * t.sym * inv_root).eval();
  }

  VectorizeResult out;
  if (fixed_k) {
    out.k_used = *fixed_k;
  } else {
    const double std_delta = pooled_std(items, false);
    const double std_sym = pooled_std(items, true);
    if (std_sym == 0.0)
      throw ZeroVariance("vectorize: SPD block has zero variance");
    out.k_used = std_delta / std_sym;
  }

  out.vectors.resize(static_cast<Eigen::Index>(items.size()), dim);
  for (std::size_t i = 0; i < items.size(); ++i) {
    Eigen::Map<const Vector> delta_vec(items[i].delta.data(),
                                       static_cast<Eigen::Index>(d) * r);
    Eigen::Map<const Vector> sym_vec(items[i].sym.data(),
                                     static_cast<Eigen::Index>(r) * r);
    out.vectors.row(static_cast<Eigen::Index>(i)).head(d * r) = delta_vec;
    out.vectors.row(static_cast<Eigen::Index>(i)).tail(r * r) =
        out.k_used * sym_vec;
  }
  return out;
}

PcaModel pca_fit(const Matrix& vectors, int components) {
  const Eigen::Index n = vectors.rows();
  const Eigen::Index dim = vectors.cols();
  if (components < 1 || components > std::min<Eigen::Index>(n, dim))
    throw InvalidComponentCount("pca_fit: components must be in [1, min(N, D)]");

  PcaModel model;
  model.components = components;
  model.mean = vectors.colwise().mean();
  // Columns hold the centered vectors; principal directions are the leading
  // left singular vectors.
  Matrix centered = (vectors.rowwise() - model.mean.transpose()).transpose();
  CompactSvd svd = svd_compact(centered);
  model.basis = svd.u.leftCols(components);
  return model;
}

Matrix pca_apply(const PcaModel& model, const Matrix& vectors) {
  if (vectors.cols() != model.mean.size())
    throw DimensionMismatch("pca_apply: vector length mismatch");
  return (vectors.rowwise() - model.mean.transpose()) * model.basis;
}

}  // namespace spsdgeo
