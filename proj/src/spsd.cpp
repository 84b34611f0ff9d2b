#include "spsdgeo/spsd.hpp"

#include <cmath>

#include "spsdgeo/errors.hpp"
#include "spsdgeo/grassmann.hpp"
#include "spsdgeo/spd.hpp"
#include "spsdgeo/sym_eig.hpp"

namespace spsdgeo {

namespace {

void check_point(const SpsdPoint& x, const char* what) {
  if (x.frame.rows() <= x.frame.cols())
    throw DimensionMismatch(std::string(what) + ": frame must be d-by-r, d > r");
  if (x.core.rows() != x.core.cols() || x.core.rows() != x.frame.cols())
    throw DimensionMismatch(std::string(what) + ": core must be r-by-r");
}

void check_compatible(const SpsdPoint& a, const SpsdPoint& b,
                      const char* what) {
  check_point(a, what);
  check_point(b, what);
  if (a.dim() != b.dim() || a.rank() != b.rank())
    throw DimensionMismatch(std::string(what) + ": points live on different manifolds");
}

void check_aligned(const SpsdPoint& x1, const SpsdPoint& x2,
                   const char* what) {
  const Matrix projected = grass_project(x1.frame, x2.frame);
  const double tol = 1e-8 * std::sqrt(static_cast<double>(x2.rank()));
  if ((projected - x2.frame).norm() > tol)
    throw NotAligned(std::string(what) + ": second frame is not the aligned representative");
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

int detected_rank(const Vector& values, double rank_tol) {
  const double largest = values(0);
  if (largest <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) > rank_tol * largest) ++rank;
  return rank;
}

}  // namespace

SpsdPoint spsd_factor(const Matrix& c, int r, double rank_tol) {
  if (c.rows() != c.cols()) throw DimensionMismatch("spsd_factor: square input required");
  if (r < 1 || r >= c.rows())
    throw ConfigError("spsd_factor: rank must satisfy 1 <= r < d");
  SymEig eig = sym_eig(c);
  const int actual = detected_rank(eig.values, rank_tol);
  if (actual != r)
    throw RankMismatch("spsd_factor: numerical rank " + std::to_string(actual) +
                           " differs from requested " + std::to_string(r),
                       actual);
  SpsdPoint out;
  out.frame = eig.vectors.leftCols(r);
  out.core = symmetrize(out.frame.transpose() * c * out.frame);
  return out;
}

SpsdPoint spsd_factor_truncated(const Matrix& c, int r, double rank_tol) {
  if (c.rows() != c.cols()) throw DimensionMismatch("spsd_factor: square input required");
  if (r < 1 || r >= c.rows())
    throw ConfigError("spsd_factor: rank must satisfy 1 <= r < d");
  SymEig eig = sym_eig(c);
  const int actual = detected_rank(eig.values, rank_tol);
  if (actual < r)
    throw RankMismatch("spsd_factor: numerical rank " + std::to_string(actual) +
                           " is below requested " + std::to_string(r),
                       actual);
  SpsdPoint out;
  out.frame = eig.vectors.leftCols(r);
  out.core = symmetrize(out.frame.transpose() * c * out.frame);
  return out;
}

Matrix spsd_compose(const SpsdPoint& x) {
  check_point(x, "spsd_compose");
  return symmetrize(x.frame * x.core * x.frame.transpose());
}

SpsdPoint align_to_frame(const Matrix& g_base, const SpsdPoint& x) {
  check_point(x, "align_to_frame");
  if (g_base.rows() != x.frame.rows() || g_base.cols() != x.frame.cols())
    throw DimensionMismatch("align_to_frame: frame mismatch");
  SpsdPoint out;
  out.frame = grass_project(g_base, x.frame);
  // Same span, so the rotation relating the frames is o = x.frame^T out.frame.
  const Matrix o = x.frame.transpose() * out.frame;
  out.core = symmetrize(o.transpose() * x.core * o);
  return out;
}

SpsdPoint align_pair(const SpsdPoint& x1, const SpsdPoint& x2) {
  check_compatible(x1, x2, "align_pair");
  return align_to_frame(x1.frame, x2);
}

double spsd_inner(const SpsdTangent& t1, const SpsdTangent& t2,
                  const SpsdPoint& base, const SpsdMetricConfig& cfg) {
  check_point(base, "spsd_inner");
  if (t1.delta.rows() != base.dim() || t1.delta.cols() != base.rank() ||
      t2.delta.rows() != base.dim() || t2.delta.cols() != base.rank() ||
      t1.sym.rows() != base.rank() || t2.sym.rows() != base.rank())
    throw BaseMismatch("spsd_inner: tangents do not match the base point");
  const double grass_part = (t1.delta.transpose() * t2.delta).trace();
  return grass_part + cfg.k * spd_inner(t1.sym, t2.sym, base.core);
}

SpsdPoint spsd_geodesic(const SpsdPoint& x1, const SpsdPoint& x2, double t) {
  check_compatible(x1, x2, "spsd_geodesic");
  check_aligned(x1, x2, "spsd_geodesic");
  SpsdPoint out;
  out.frame = grass_geodesic(x1.frame, x2.frame, t);
  out.core = spd_geodesic(x1.core, x2.core, t);
  return out;
}

double spsd_curve_length(const SpsdPoint& x1, const SpsdPoint& x2,
                         const SpsdMetricConfig& cfg) {
  check_compatible(x1, x2, "spsd_curve_length");
  const SpsdPoint x2a = align_pair(x1, x2);
  const double dg = grass_distance(x1.frame, x2a.frame);
  const double dp = spd_distance(x1.core, x2a.core);
  return std::sqrt(dg * dg + cfg.k * dp * dp);
}

SpsdTangent spsd_log(const SpsdPoint& base, const SpsdPoint& x) {
  check_compatible(base, x, "spsd_log");
  const SpsdPoint xa = align_pair(base, x);
  SpsdTangent out;
  out.delta = grass_log(base.frame, xa.frame);
  out.sym = spd_log(base.core, xa.core);
  return out;
}

SpsdPoint spsd_exp(const SpsdPoint& base, const SpsdTangent& t) {
  check_point(base, "spsd_exp");
  if (t.delta.rows() != base.dim() || t.delta.cols() != base.rank() ||
      t.sym.rows() != base.rank() || t.sym.cols() != base.rank())
    throw DimensionMismatch("spsd_exp: tangent does not match the base point");
  SpsdPoint out;
  out.frame = grass_exp(base.frame, t.delta);
  out.core = spd_exp(base.core, t.sym);
  return out;
}

SpsdTangent spsd_pt(const SpsdPoint& from, const SpsdPoint& to,
                    const SpsdTangent& t) {
  check_compatible(from, to, "spsd_pt");
  check_aligned(from, to, "spsd_pt");
  const OrthFrame q = orth_complete(from.frame);
  const Matrix b = grass_log_full(q, orth_complete(to.frame));
  SpsdTangent out;
  out.delta = grass_pt(q, b, 1.0, t.delta);
  out.sym = spd_pt(from.core, to.core, t.sym);
  return out;
}

namespace {

// Gauge-free representative of the range of compose(x): the eigen-frame of
// G P G^T, computed from the r-by-r core spectrum. Makes the whole
// canonicalization independent of how the inputs were gauged.
Matrix range_frame(const SpsdPoint& x) {
  SymEig eig = sym_eig(x.core);
  Matrix frame = x.frame * eig.vectors;
  fix_dominant_signs(frame);
  return frame;
}

}  // namespace

CanonicalSet spsd_canonicalize(const std::vector<SpsdPoint>& items,
                               const MeanConfig& cfg,
                               SpsdMeanDiagnostics* diag) {
  if (items.empty()) throw EmptySet("spsd_canonicalize: empty set");
  for (const SpsdPoint& x : items)
    check_compatible(items.front(), x, "spsd_canonicalize");

  std::vector<Matrix> frames;
  frames.reserve(items.size());
  for (const SpsdPoint& x : items) frames.push_back(range_frame(x));

  CanonicalSet out;
  out.mean_frame =
      grass_mean(frames, cfg, diag ? &diag->grassmann : nullptr);

  out.items.reserve(items.size());
  std::vector<Matrix> cores;
  cores.reserve(items.size());
  for (const SpsdPoint& x : items) {
    out.items.push_back(align_to_frame(out.mean_frame, x));
    cores.push_back(out.items.back().core);
  }
  out.mean_core = spd_mean(cores, cfg, diag ? &diag->spd : nullptr);
  return out;
}

SpsdPoint spsd_mean(const std::vector<SpsdPoint>& items, const MeanConfig& cfg,
                    SpsdMeanDiagnostics* diag) {
  return spsd_canonicalize(items, cfg, diag).mean();
}

}  // namespace spsdgeo
