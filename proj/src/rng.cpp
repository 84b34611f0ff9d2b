#include "spsdgeo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is kept away from zero so the log is finite.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ConfigError("Rng::index: empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return draw % n;
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n,
                                                         std::size_t k) {
  if (k > n)
    throw ConfigError("Rng::sample_without_replacement: sample larger than population");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Matrix Rng::gaussian(int rows, int cols) {
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = normal();
  return out;
}

Matrix random_frame(Rng& rng, int d, int r) {
  const Matrix z = rng.gaussian(d, r);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, r);
  const Matrix rfac = q.transpose() * z;
  for (int j = 0; j < r; ++j)
    if (rfac(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_orthogonal(Rng& rng, int d) {
  const Matrix z = rng.gaussian(d, d);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix rfac = q.transpose() * z;
  for (int j = 0; j < d; ++j)
    if (rfac(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_symmetric(Rng& rng, int dim, double scale) {
  const Matrix a = rng.gaussian(dim, dim);
  return scale * 0.5 * (a + a.transpose());
}

Matrix random_spd(Rng& rng, int dim, double scale) {
  return sym_expm(random_symmetric(rng, dim, scale));
}

}  // namespace spsdgeo
