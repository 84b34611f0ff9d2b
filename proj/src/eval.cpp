#include "spsdgeo/eval.hpp"

#include <limits>

#include "spsdgeo/errors.hpp"

namespace spsdgeo {

std::vector<int> nearest_centroid(const Matrix& train,
                                  const std::vector<int>& train_labels,
                                  const Matrix& test) {
  if (train.rows() != static_cast<Eigen::Index>(train_labels.size()))
    throw LengthMismatch("nearest_centroid: label count differs from row count");
  if (train.rows() == 0) throw EmptyClass("nearest_centroid: no training data");
  if (test.cols() != train.cols())
    throw DimensionMismatch("nearest_centroid: feature width mismatch");

  // std::map keeps class ids sorted, which settles distance ties.
  std::map<int, std::pair<Vector, int>> sums;
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    auto [it, inserted] = sums.try_emplace(
        train_labels[static_cast<std::size_t>(i)],
        std::make_pair(Vector::Zero(train.cols()).eval(), 0));
    it->second.first += train.row(i).transpose();
    it->second.second += 1;
  }
  std::vector<std::pair<int, Vector>> centroids;
  centroids.reserve(sums.size());
  for (const auto& [label, acc] : sums)
    centroids.emplace_back(label, acc.first / static_cast<double>(acc.second));

  std::vector<int> out(static_cast<std::size_t>(test.rows()));
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_label = centroids.front().first;
    for (const auto& [label, centroid] : centroids) {
      const double dist = (test.row(i).transpose() - centroid).squaredNorm();
      if (dist < best) {
        best = dist;
        best_label = label;
      }
    }
    out[static_cast<std::size_t>(i)] = best_label;
  }
  return out;
}

ConfusionSummary cohen_kappa(const std::vector<int>& truth,
                             const std::vector<int>& predicted) {
  if (truth.size() != predicted.size())
    throw LengthMismatch("cohen_kappa: label vectors differ in length");
  if (truth.empty()) throw LengthMismatch("cohen_kappa: empty label vectors");

  ConfusionSummary out;
  out.total = static_cast<int>(truth.size());
  int agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.true_counts[truth[i]] += 1;
    out.predicted_counts[predicted[i]] += 1;
    if (truth[i] == predicted[i]) ++agree;
  }
  const double n = static_cast<double>(out.total);
  out.accuracy = static_cast<double>(agree) / n;

  double chance = 0.0;
  for (const auto& [label, count] : out.true_counts) {
    const auto it = out.predicted_counts.find(label);
    if (it != out.predicted_counts.end())
      chance += static_cast<double>(count) * static_cast<double>(it->second);
  }
  out.chance = chance / (n * n);

  if (out.chance >= 1.0) {
    out.chance_degenerate = true;
    out.kappa = 1.0;
  } else {
    out.kappa = (out.accuracy - out.chance) / (1.0 - out.chance);
  }
  return out;
}

}  // namespace spsdgeo
