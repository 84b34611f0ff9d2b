#pragma once

#include <vector>

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Grassmann operations in the thin d-by-r representation. A frame G is any
// d-by-r matrix with orthonormal columns; it stands for span(G). Tangents at
// G are d-by-r matrices orthogonal to G (horizontal). Full d-by-d
// representatives (OrthFrame) appear only where a rotation of the whole
// space is needed.

// Deterministic orthogonal completion [G | G_perp]; the complement columns
// come from the unit eigenvectors of I - G G^T.
OrthFrame orth_complete(const Matrix& g);

// Exponential map at g along the horizontal tangent delta.
Matrix grass_exp(const Matrix& g, const Matrix& delta);

// Full-frame exponential Q exp([[0, -B^T], [B, 0]]) computed from the
// compact SVD of B in closed form.
OrthFrame grass_exp_full(const OrthFrame& q, const Matrix& b);

// Logarithmic map at g of g0. Throws SubspaceTooFar when a principal angle
// reaches pi/2 (smallest singular value of g^T g0 below kAngleTol).
Matrix grass_log(const Matrix& g, const Matrix& g0);

// Same map expressed in the completed frame: returns B0 with
// Log_g(g0) = G_perp B0.
Matrix grass_log_full(const OrthFrame& q, const OrthFrame& q0);

// Geodesic between the spans of g1 and g2; at t=1 the result spans [g2]
// but need not equal g2 entrywise.
Matrix grass_geodesic(const Matrix& g1, const Matrix& g2, double t);

// Principal-angle distance ||Theta||_F.
double grass_distance(const Matrix& g1, const Matrix& g2);

// Representative of [g2] closest to g1: g2 O2 O1^T from the SVD of g1^T g2.
Matrix grass_project(const Matrix& g1, const Matrix& g2);

// Full-frame projection Q1 exp(B^skew) of q2 onto the fiber over q1.
OrthFrame grass_project_full(const OrthFrame& q1, const OrthFrame& q2);

// Parallel transport of the horizontal tangent delta (at the leftmost-r
// frame of q) along the geodesic generated by b_tilde, evaluated at t.
Matrix grass_pt(const OrthFrame& q, const Matrix& b_tilde, double t,
                const Matrix& delta);

// Frechet mean on the Grassmann manifold, started at the first frame.
Matrix grass_mean(const std::vector<Matrix>& frames,
                  const MeanConfig& cfg = {}, MeanDiagnostics* diag = nullptr);

}  // namespace spsdgeo
