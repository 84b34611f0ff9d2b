#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Angle between two vectors, arccos of the clamped cosine similarity.
double cosine_angle(const Vector& p, const Vector& q);

// Unbiased sample covariance of the rows of `points`.
Matrix sample_covariance(const Matrix& points);

struct FeatureConfig {
  int window = 25;    // odd patch side W
  int neighbors = 220;  // J
  int rank = 1;
  std::optional<std::pair<int, int>> grid;  // (n_x, n_y); no grid = whole list
  int min_valid = 2;   // minimum candidate count to emit a descriptor

  void validate() const;
};

// Local covariance descriptor of pixel i: the J angularly-nearest valid
// pixels in the W-by-W patch around i (ties broken by lower index), their
// sample covariance, eigen-truncated to rank r. Returns nullopt when the
// pixel has too few valid neighbors or the truncated spectrum cannot
// support rank r.
std::optional<SpsdPoint> local_covariance(const Matrix& pixels, int i,
                                          const FeatureConfig& cfg);

struct FeatureResult {
  std::vector<SpsdPoint> descriptors;
  std::vector<int> pixel_indices;  // which pixel produced each descriptor
};

// Descriptors for every valid pixel, in pixel order. Parallel over pixels;
// output order does not depend on the schedule.
FeatureResult extract_features(const Matrix& pixels, const FeatureConfig& cfg,
                               bool parallel = true);

}  // namespace spsdgeo
