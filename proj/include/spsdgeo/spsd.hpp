#pragma once

#include <optional>
#include <vector>

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Structure-space operations on fixed-rank SPSD matrices. A point is a pair
// (G, P); the represented matrix is C = G P G^T. The pair is only defined up
// to an r-by-r rotation (G O, O^T P O), so set-level operations first fix the
// gauge by aligning every frame to a common mean frame.

// Factor a d-by-d symmetric PSD matrix of numerical rank exactly r. Throws
// RankMismatch (carrying the detected rank) when the spectrum does not show
// a clean rank-r gap at rank_tol.
SpsdPoint spsd_factor(const Matrix& c, int r, double rank_tol = kRankTol);

// Top-r truncation: keeps the leading r eigenpairs regardless of what
// trails them. Still requires lambda_r > rank_tol * lambda_1.
SpsdPoint spsd_factor_truncated(const Matrix& c, int r,
                                double rank_tol = kRankTol);

Matrix spsd_compose(const SpsdPoint& x);

// Re-gauge x2 so its frame is the representative of [x2.frame] closest to
// x1.frame; the composed matrix is unchanged.
SpsdPoint align_to_frame(const Matrix& g_base, const SpsdPoint& x);
SpsdPoint align_pair(const SpsdPoint& x1, const SpsdPoint& x2);

// Product inner product <(d1,s1),(d2,s2)> = tr(d1^T d2) + k <s1,s2>_P.
double spsd_inner(const SpsdTangent& t1, const SpsdTangent& t2,
                  const SpsdPoint& base, const SpsdMetricConfig& cfg = {});

// Componentwise approximate geodesic; x2 must already be aligned to x1
// (throws NotAligned otherwise).
SpsdPoint spsd_geodesic(const SpsdPoint& x1, const SpsdPoint& x2, double t);

// Length of the approximate geodesic, sqrt(d_G^2 + k d_P^2). Aligns
// internally; symmetric, but not a metric (no triangle inequality).
double spsd_curve_length(const SpsdPoint& x1, const SpsdPoint& x2,
                         const SpsdMetricConfig& cfg = {});

// Approximate logarithmic map at base (aligns x internally).
SpsdTangent spsd_log(const SpsdPoint& base, const SpsdPoint& x);

// Approximate exponential map at base; inverse of spsd_log.
SpsdPoint spsd_exp(const SpsdPoint& base, const SpsdTangent& t);

// Approximate parallel transport of t from `from` to `to`; `to` must be
// aligned to `from`.
SpsdTangent spsd_pt(const SpsdPoint& from, const SpsdPoint& to,
                    const SpsdTangent& t);

// A set re-gauged against its own mean: every item frame is the projection
// of itself onto the fiber over mean_frame, and mean_core is the SPD mean
// of the aligned cores.
struct CanonicalSet {
  Matrix mean_frame;
  Matrix mean_core;
  std::vector<SpsdPoint> items;
  std::optional<std::vector<int>> labels;

  SpsdPoint mean() const { return SpsdPoint{mean_frame, mean_core}; }
};

struct SpsdMeanDiagnostics {
  MeanDiagnostics grassmann;
  MeanDiagnostics spd;
};

// Rank-preserving mean: Grassmann mean of the frames, then SPD mean of the
// cores after aligning each item to the mean frame.
CanonicalSet spsd_canonicalize(const std::vector<SpsdPoint>& items,
                               const MeanConfig& cfg = {},
                               SpsdMeanDiagnostics* diag = nullptr);

SpsdPoint spsd_mean(const std::vector<SpsdPoint>& items,
                    const MeanConfig& cfg = {},
                    SpsdMeanDiagnostics* diag = nullptr);

}  // namespace spsdgeo
