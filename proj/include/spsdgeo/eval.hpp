#pragma once

#include <map>
#include <vector>

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Euclidean nearest-centroid prediction; ties go to the lower class id.
std::vector<int> nearest_centroid(const Matrix& train,
                                  const std::vector<int>& train_labels,
                                  const Matrix& test);

struct ConfusionSummary {
  std::map<int, int> true_counts;
  std::map<int, int> predicted_counts;
  int total = 0;
  double accuracy = 0.0;  // p_o
  double chance = 0.0;    // p_e
  double kappa = 0.0;
  bool chance_degenerate = false;  // p_e == 1, kappa reported as 1
};

// Chance-corrected agreement kappa = (p_o - p_e) / (1 - p_e) with
// p_e = (1/N^2) sum_k n_k^true n_k^pred.
ConfusionSummary cohen_kappa(const std::vector<int>& truth,
                             const std::vector<int>& predicted);

}  // namespace spsdgeo
