#include "spsdgeo/grassmann.hpp"

#include <algorithm>
#include <cmath>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

namespace {

void check_frame_shape(const Matrix& g, const char* what) {
  if (g.rows() <= g.cols())
    throw DimensionMismatch(std::string(what) + ": frame must be tall (d > r)");
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(what) + ": dimension mismatch");
}

// Remove any component along g; tangents are horizontal by contract but
// accumulated roundoff is projected away before use.
Matrix horizontalize(const Matrix& g, const Matrix& delta) {
  return delta - g * (g.transpose() * delta);
}

}  // namespace

OrthFrame orth_complete(const Matrix& g) {
  check_frame_shape(g, "orth_complete");
  const Eigen::Index d = g.rows();
  const Eigen::Index r = g.cols();
  const Matrix projector =
      Matrix::Identity(d, d) - g * g.transpose();
  SymEig eig = sym_eig(projector);  // eigenvalues 1 (d-r times) then 0
  OrthFrame out;
  out.rank = static_cast<int>(r);
  out.q.resize(d, d);
  out.q.leftCols(r) = g;
  out.q.rightCols(d - r) = eig.vectors.leftCols(d - r);
  return out;
}

Matrix grass_exp(const Matrix& g, const Matrix& delta) {
  check_same_shape(g, delta, "grass_exp");
  const Matrix h = horizontalize(g, delta);
  CompactSvd svd = svd_compact(h);
  const Vector cos_s = svd.singular_values.array().cos();
  const Vector sin_s = svd.singular_values.array().sin();
  return (g * svd.v * cos_s.asDiagonal() + svd.u * sin_s.asDiagonal()) *
         svd.v.transpose();
}

OrthFrame grass_exp_full(const OrthFrame& q, const Matrix& b) {
  const Eigen::Index d = q.q.rows();
  const Eigen::Index r = q.rank;
  if (b.rows() != d - r || b.cols() != r)
    throw DimensionMismatch("grass_exp_full: B must be (d-r)-by-r");
  // exp of the skew block matrix via the compact SVD of B:
  //   exp([[0,-B^T],[B,0]]) = I + [[V(cos-I)V^T, -V sin U^T],
  //                                [U sin V^T,   U(cos-I)U^T]]
  CompactSvd svd = svd_compact(b);
  const Eigen::Index k = svd.singular_values.size();
  const Vector cos_s = svd.singular_values.array().cos();
  const Vector sin_s = svd.singular_values.array().sin();
  const Vector cos_m1 = cos_s - Vector::Ones(k);

  Matrix rot = Matrix::Identity(d, d);
  rot.topLeftCorner(r, r) +=
      svd.v * cos_m1.asDiagonal() * svd.v.transpose();
  rot.topRightCorner(r, d - r) =
      -svd.v * sin_s.asDiagonal() * svd.u.transpose();
  rot.bottomLeftCorner(d - r, r) =
      svd.u * sin_s.asDiagonal() * svd.v.transpose();
  rot.bottomRightCorner(d - r, d - r) +=
      svd.u * cos_m1.asDiagonal() * svd.u.transpose();

  OrthFrame out;
  out.rank = q.rank;
  out.q = q.q * rot;
  return out;
}

Matrix grass_log(const Matrix& g, const Matrix& g0) {
  check_same_shape(g, g0, "grass_log");
  const Matrix overlap = g.transpose() * g0;
  CompactSvd overlap_svd = svd_compact(overlap);
  const double smallest =
      overlap_svd.singular_values(overlap_svd.singular_values.size() - 1);
  if (smallest < kAngleTol)
    throw SubspaceTooFar("grass_log: a principal angle reaches pi/2");

  const Matrix residual =
      (g0 - g * overlap) *
      (overlap_svd.v * overlap_svd.singular_values.cwiseInverse().asDiagonal() *
       overlap_svd.u.transpose());
  CompactSvd svd = svd_compact(residual);
  const Vector angles = svd.singular_values.array().atan();
  return svd.u * angles.asDiagonal() * svd.v.transpose();
}

Matrix grass_log_full(const OrthFrame& q, const OrthFrame& q0) {
  if (q.q.rows() != q0.q.rows() || q.rank != q0.rank)
    throw DimensionMismatch("grass_log_full: frame mismatch");
  const Matrix delta = grass_log(q.thin(), q0.thin());
  return q.complement().transpose() * delta;
}

Matrix grass_geodesic(const Matrix& g1, const Matrix& g2, double t) {
  return grass_exp(g1, t * grass_log(g1, g2));
}

double grass_distance(const Matrix& g1, const Matrix& g2) {
  check_same_shape(g1, g2, "grass_distance");
  const Matrix overlap = g1.transpose() * g2;
  // Cosines lose half the precision for tiny angles (acos is infinitely
  // steep at 1), so small angles are taken from the sines instead: the
  // singular values of the residual (I - g1 g1^T) g2.
  const Vector cosines = svd_compact(overlap).singular_values;  // descending
  const Vector sines =
      svd_compact(g2 - g1 * overlap).singular_values;  // descending
  const Eigen::Index r = cosines.size();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(r - 1 - i), 0.0, 1.0);
    const double theta = c * c >= 0.5 ? std::asin(s) : std::acos(c);
    sum += theta * theta;
  }
  return std::sqrt(sum);
}

Matrix grass_project(const Matrix& g1, const Matrix& g2) {
  check_same_shape(g1, g2, "grass_project");
  CompactSvd svd = svd_compact(g1.transpose() * g2);
  const double smallest =
      svd.singular_values(svd.singular_values.size() - 1);
  if (smallest < kAngleTol)
    throw SubspaceTooFar("grass_project: a principal angle reaches pi/2");
  return g2 * svd.v * svd.u.transpose();
}

OrthFrame grass_project_full(const OrthFrame& q1, const OrthFrame& q2) {
  const Matrix b = grass_log_full(q1, q2);
  return grass_exp_full(q1, b);
}

Matrix grass_pt(const OrthFrame& q, const Matrix& b_tilde, double t,
                const Matrix& delta) {
  if (delta.rows() != q.q.rows() || delta.cols() != q.rank)
    throw DimensionMismatch("grass_pt: tangent must be d-by-r");
  const OrthFrame moved = grass_exp_full(q, t * b_tilde);
  return moved.q * (q.q.transpose() * delta);
}

Matrix grass_mean(const std::vector<Matrix>& frames, const MeanConfig& cfg,
                  MeanDiagnostics* diag) {
  if (frames.empty()) throw EmptySet("grass_mean: empty set");
  for (const Matrix& g : frames)
    check_same_shape(frames.front(), g, "grass_mean");
  if (diag) *diag = MeanDiagnostics{};
  if (frames.size() == 1) return frames.front();

  Matrix mean = frames.front();
  const double inv_n = 1.0 / static_cast<double>(frames.size());
  double residual = 0.0;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Matrix step = Matrix::Zero(mean.rows(), mean.cols());
    for (const Matrix& g : frames) step += grass_log(mean, g);
    step *= inv_n;
    residual = step.norm();
    if (diag) {
      diag->iterations = iter + 1;
      diag->final_residual = residual;
    }
    if (residual <= cfg.eps) return mean;
    mean = grass_exp(mean, step);
  }
  throw NoConvergence("grass_mean: no convergence", mean, cfg.max_iter,
                      residual);
}

}  // namespace spsdgeo
