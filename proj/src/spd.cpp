#include "spsdgeo/spd.hpp"

#include <cmath>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

namespace {

void check_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(what) + ": dimension mismatch");
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

Matrix spd_geodesic(const Matrix& p1, const Matrix& p2, double t) {
  check_same_dim(p1, p2, "spd_geodesic");
  const Matrix root = spd_sqrt(p1);
  const Matrix inv_root = spd_invsqrt(p1);
  const Matrix middle = spd_power(symmetrize(inv_root * p2 * inv_root), t);
  return symmetrize(root * middle * root);
}

double spd_distance(const Matrix& p1, const Matrix& p2) {
  check_same_dim(p1, p2, "spd_distance");
  const Matrix inv_root = spd_invsqrt(p1);
  SymEig eig = check_spd(symmetrize(inv_root * p2 * inv_root), "spd_distance");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double l = std::log(eig.values(i));
    sum += l * l;
  }
  return std::sqrt(sum);
}

Matrix spd_exp(const Matrix& p, const Matrix& s) {
  check_same_dim(p, s, "spd_exp");
  const Matrix root = spd_sqrt(p);
  const Matrix inv_root = spd_invsqrt(p);
  const Matrix inner = sym_expm(symmetrize(inv_root * s * inv_root));
  return symmetrize(root * inner * root);
}

Matrix spd_log(const Matrix& p, const Matrix& p0) {
  check_same_dim(p, p0, "spd_log");
  const Matrix root = spd_sqrt(p);
  const Matrix inv_root = spd_invsqrt(p);
  const Matrix inner = spd_logm(symmetrize(inv_root * p0 * inv_root));
  return symmetrize(root * inner * root);
}

Matrix spd_congruence_factor(const Matrix& p1, const Matrix& p2) {
  check_same_dim(p1, p2, "spd_congruence_factor");
  const Matrix root = spd_sqrt(p1);
  const Matrix inv_root = spd_invsqrt(p1);
  const Matrix middle = spd_sqrt(symmetrize(inv_root * p2 * inv_root));
  return root * middle * inv_root;
}

Matrix spd_pt(const Matrix& p1, const Matrix& p2, const Matrix& s) {
  const Matrix e = spd_congruence_factor(p1, p2);
  return symmetrize(e * s * e.transpose());
}

double spd_inner(const Matrix& s1, const Matrix& s2, const Matrix& p) {
  check_same_dim(s1, s2, "spd_inner");
  check_same_dim(s1, p, "spd_inner");
  const Matrix inv_root = spd_invsqrt(p);
  const Matrix w1 = inv_root * s1 * inv_root;
  const Matrix w2 = inv_root * s2 * inv_root;
  return (w1.transpose() * w2).trace();
}

Matrix spd_mean(const std::vector<Matrix>& points, const MeanConfig& cfg,
                MeanDiagnostics* diag) {
  if (points.empty()) throw EmptySet("spd_mean: empty set");
  const Eigen::Index d = points.front().rows();
  for (const Matrix& p : points) check_same_dim(points.front(), p, "spd_mean");
  if (diag) *diag = MeanDiagnostics{};
  if (points.size() == 1) return points.front();

  Matrix mean = Matrix::Zero(d, d);
  for (const Matrix& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  const double inv_n = 1.0 / static_cast<double>(points.size());
  double residual = 0.0;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Matrix step = Matrix::Zero(d, d);
    for (const Matrix& p : points) step += spd_log(mean, p);
    step *= inv_n;
    residual = step.norm();
    if (diag) {
      diag->iterations = iter + 1;
      diag->final_residual = residual;
    }
    if (residual <= cfg.eps) return mean;
    mean = spd_exp(mean, step);
  }
  throw NoConvergence("spd_mean: no convergence", mean, cfg.max_iter,
                      residual);
}

Matrix spd_whiten(const Matrix& pbar, const Matrix& p) {
  check_same_dim(pbar, p, "spd_whiten");
  const Matrix inv_root = spd_invsqrt(pbar);
  return spd_logm(symmetrize(inv_root * p * inv_root));
}

}  // namespace spsdgeo
