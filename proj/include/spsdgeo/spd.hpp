#pragma once

#include <vector>

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Riemannian operations on the manifold of symmetric positive definite
// matrices under the affine-invariant metric. All functions are pure and
// safe to call concurrently.

// Geodesic from p1 to p2 at parameter t in [0, 1].
Matrix spd_geodesic(const Matrix& p1, const Matrix& p2, double t);

// Affine-invariant distance sqrt(sum_i log^2 lambda_i(p1^-1 p2)).
double spd_distance(const Matrix& p1, const Matrix& p2);

// Exponential map at p applied to the symmetric tangent s.
Matrix spd_exp(const Matrix& p, const Matrix& s);

// Logarithmic map at p of the point p0; inverse of spd_exp.
Matrix spd_log(const Matrix& p, const Matrix& p0);

// Parallel transport of the tangent s from p1 to p2 along the geodesic.
Matrix spd_pt(const Matrix& p1, const Matrix& p2, const Matrix& s);

// Congruence factor E with E p1 E^T = p2, computed in the stabilized form
// p1^{1/2} (p1^{-1/2} p2 p1^{-1/2})^{1/2} p1^{-1/2}.
Matrix spd_congruence_factor(const Matrix& p1, const Matrix& p2);

// Affine-invariant inner product of two tangents at p.
double spd_inner(const Matrix& s1, const Matrix& s2, const Matrix& p);

// Frechet mean: arithmetic-mean start, then fixed-point iteration on the
// mean tangent until its Frobenius norm drops below cfg.eps. Throws
// NoConvergence (carrying the last iterate) after cfg.max_iter steps.
Matrix spd_mean(const std::vector<Matrix>& points, const MeanConfig& cfg = {},
                MeanDiagnostics* diag = nullptr);

// Whitened tangent log(pbar^{-1/2} p pbar^{-1/2}); Euclidean distances
// between whitened tangents lower-bound the manifold distance.
Matrix spd_whiten(const Matrix& pbar, const Matrix& p);

}  // namespace spsdgeo
