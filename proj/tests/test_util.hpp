#pragma once

#include <cmath>

#include "spsdgeo/grassmann.hpp"
#include "spsdgeo/rng.hpp"
#include "spsdgeo/spsd.hpp"
#include "spsdgeo/sym_eig.hpp"
#include "spsdgeo/types.hpp"

namespace spsdgeo::testutil {

inline double rel_err(const Matrix& got, const Matrix& want) {
  const double scale = want.norm();
  return scale == 0.0 ? got.norm() : (got - want).norm() / scale;
}

// SPD matrix with eigenvalues log-uniform in [1/sqrt(cond), sqrt(cond)].
inline Matrix random_spd_conditioned(Rng& rng, int d, double cond) {
  const Matrix q = random_orthogonal(rng, d);
  Vector eigs(d);
  const double half_log = 0.5 * std::log(cond);
  for (int i = 0; i < d; ++i)
    eigs(i) = std::exp((2.0 * rng.uniform() - 1.0) * half_log);
  return q * eigs.asDiagonal() * q.transpose();
}

// Horizontal tangent at g with Frobenius norm `norm`.
inline Matrix random_horizontal(Rng& rng, const Matrix& g, double norm) {
  Matrix z = rng.gaussian(static_cast<int>(g.rows()),
                          static_cast<int>(g.cols()));
  z -= g * (g.transpose() * z);
  return norm / z.norm() * z;
}

// Frame whose largest principal angle to g is at most max_angle.
inline Matrix random_frame_near(Rng& rng, const Matrix& g, double max_angle) {
  Matrix delta = random_horizontal(rng, g, 1.0);
  // Cap the largest singular value (the largest principal angle moved).
  CompactSvd svd = svd_compact(delta);
  const double top = svd.singular_values(0);
  return grass_exp(g, (max_angle * rng.uniform() / top) * delta);
}

// Random structure-space point with well-conditioned core.
inline SpsdPoint random_spsd_point(Rng& rng, int d, int r,
                                   double core_spread = 0.6) {
  SpsdPoint x;
  x.frame = random_frame(rng, d, r);
  x.core = random_spd(rng, r, core_spread);
  return x;
}

}  // namespace spsdgeo::testutil
