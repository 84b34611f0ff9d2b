#pragma once

#include <Eigen/Dense>

namespace spsdgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative eigenvalue floor below which a symmetric matrix is treated as
// singular.
inline constexpr double kSpdTol = 1e-12;

// Smallest admissible singular value of G1^T G2; smaller means a principal
// angle at (or numerically at) pi/2.
inline constexpr double kAngleTol = 1e-10;

// Relative eigenvalue threshold separating "rank r" from "not rank r".
inline constexpr double kRankTol = 1e-9;

// Structure-space representation of a rank-r SPSD matrix: C = G P G^T with
// G a d-by-r orthonormal frame and P an r-by-r SPD core.
struct SpsdPoint {
  Matrix frame;
  Matrix core;

  int dim() const { return static_cast<int>(frame.rows()); }
  int rank() const { return static_cast<int>(frame.cols()); }
};

// Tangent pair at a structure-space point: a horizontal d-by-r frame
// direction and a symmetric r-by-r core direction.
struct SpsdTangent {
  Matrix delta;
  Matrix sym;
};

// A d-by-d orthogonal matrix whose leftmost `rank` columns are the frame it
// completes.
struct OrthFrame {
  Matrix q;
  int rank = 0;

  int dim() const { return static_cast<int>(q.rows()); }
  Matrix thin() const { return q.leftCols(rank); }
  Matrix complement() const { return q.rightCols(q.cols() - rank); }
};

struct SpsdMetricConfig {
  double k = 1.0;  // weight of the SPD block in the product metric
};

struct MeanConfig {
  double eps = 1e-10;  // stop when the mean tangent norm drops below this
  int max_iter = 200;
};

struct MeanDiagnostics {
  int iterations = 0;
  double final_residual = 0.0;
};

}  // namespace spsdgeo
