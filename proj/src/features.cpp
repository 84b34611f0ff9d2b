#include "spsdgeo/features.hpp"

#include <algorithm>
#include <cmath>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

double cosine_angle(const Vector& p, const Vector& q) {
  if (p.size() != q.size())
    throw DimensionMismatch("cosine_angle: length mismatch");
  const double np = p.norm();
  const double nq = q.norm();
  if (np == 0.0 || nq == 0.0)
    throw ZeroVector("cosine_angle: zero-length input");
  const double c = std::clamp(p.dot(q) / (np * nq), -1.0, 1.0);
  return std::acos(c);
}

Matrix sample_covariance(const Matrix& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw TooFewPoints("sample_covariance: need at least two points");
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Matrix centered = points.rowwise() - mean;
  return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

void FeatureConfig::validate() const {
  if (window < 1 || window % 2 == 0)
    throw ConfigError("FeatureConfig: window must be odd and positive");
  if (neighbors < 1) throw ConfigError("FeatureConfig: neighbors must be positive");
  if (neighbors > window * window)
    throw ConfigError("FeatureConfig: neighbors must not exceed window^2");
  if (rank < 1) throw ConfigError("FeatureConfig: rank must be positive");
  if (min_valid < rank + 1)
    throw ConfigError("FeatureConfig: min_valid must be at least rank + 1");
  if (grid && (grid->first < 1 || grid->second < 1))
    throw ConfigError("FeatureConfig: grid dimensions must be positive");
}

namespace {

bool pixel_valid(const Matrix& pixels, Eigen::Index i) {
  return pixels.row(i).norm() > 0.0;
}

// Valid candidate indices in the window around pixel i, in index order.
std::vector<int> patch_candidates(const Matrix& pixels, int i,
                                  const FeatureConfig& cfg) {
  std::vector<int> out;
  if (!cfg.grid) {
    out.reserve(static_cast<std::size_t>(pixels.rows()));
    for (Eigen::Index j = 0; j < pixels.rows(); ++j)
      if (pixel_valid(pixels, j)) out.push_back(static_cast<int>(j));
    return out;
  }
  const int nx = cfg.grid->first;
  const int ny = cfg.grid->second;
  const int half = (cfg.window - 1) / 2;
  const int xi = i % nx;
  const int yi = i / nx;
  const int x0 = std::max(0, xi - half);
  const int x1 = std::min(nx - 1, xi + half);
  const int y0 = std::max(0, yi - half);
  const int y1 = std::min(ny - 1, yi + half);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const int j = y * nx + x;
      if (pixel_valid(pixels, j)) out.push_back(j);
    }
  return out;
}

}  // namespace

std::optional<SpsdPoint> local_covariance(const Matrix& pixels, int i,
                                          const FeatureConfig& cfg) {
  cfg.validate();
  if (i < 0 || i >= pixels.rows())
    throw IndexOutOfRange("local_covariance: pixel index out of range");
  if (cfg.grid &&
      pixels.rows() != static_cast<Eigen::Index>(cfg.grid->first) *
                           cfg.grid->second)
    throw ShapeMismatch("local_covariance: grid does not match pixel count");
  if (!pixel_valid(pixels, i))
    throw ZeroVector("local_covariance: center pixel is zero");

  std::vector<int> candidates = patch_candidates(pixels, i, cfg);
  if (static_cast<int>(candidates.size()) < cfg.min_valid) return std::nullopt;

  // Stable sort keeps index order on angle ties.
  const Vector center = pixels.row(i);
  std::vector<double> angle(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c)
    angle[c] = cosine_angle(center, pixels.row(candidates[c]));
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return angle[a] < angle[b]; });

  const std::size_t take =
      std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(cfg.neighbors));
  Matrix selected(static_cast<Eigen::Index>(take), pixels.cols());
  for (std::size_t c = 0; c < take; ++c)
    selected.row(static_cast<Eigen::Index>(c)) = pixels.row(candidates[order[c]]);

  const Matrix cov = sample_covariance(selected);
  SymEig eig = sym_eig(cov);
  const double largest = eig.values(0);
  if (largest <= 0.0 || eig.values(cfg.rank - 1) <= kRankTol * largest)
    return std::nullopt;  // spectrum cannot support the requested rank

  SpsdPoint out;
  out.frame = eig.vectors.leftCols(cfg.rank);
  const Matrix core = out.frame.transpose() * cov * out.frame;
  out.core = 0.5 * (core + core.transpose());
  return out;
}

FeatureResult extract_features(const Matrix& pixels, const FeatureConfig& cfg,
                               bool parallel) {
  cfg.validate();
  const Eigen::Index n = pixels.rows();
  std::vector<std::optional<SpsdPoint>> slots(static_cast<std::size_t>(n));

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      if (pixel_valid(pixels, i))
        slots[static_cast<std::size_t>(i)] =
            local_covariance(pixels, static_cast<int>(i), cfg);
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pixel_valid(pixels, i))
        slots[static_cast<std::size_t>(i)] =
            local_covariance(pixels, static_cast<int>(i), cfg);
    }
  }

  FeatureResult out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (slots[static_cast<std::size_t>(i)]) {
      out.descriptors.push_back(std::move(*slots[static_cast<std::size_t>(i)]));
      out.pixel_indices.push_back(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace spsdgeo
