#pragma once

#include "spsdgeo/types.hpp"

namespace spsdgeo {

// Eigendecomposition A = V diag(values) V^T with eigenvalues sorted in
// descending order. Each eigenvector is sign-fixed so that its
// largest-magnitude entry is nonnegative (lowest index wins ties), which
// makes repeated runs byte-identical.
struct SymEig {
  Vector values;
  Matrix vectors;
};

// The input is symmetrized as (A + A^T)/2 before decomposition.
// Throws NonFinite if any entry is NaN or infinite.
SymEig sym_eig(const Matrix& a);

// Compact SVD A = U diag(singular_values) V^T, singular values descending,
// with the same sign convention applied to the columns of U (V flipped in
// tandem so the product is unchanged).
struct CompactSvd {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

CompactSvd svd_compact(const Matrix& a);

// Applies the eigenvector sign convention to each column of m in place.
void fix_dominant_signs(Matrix& m);

enum class SpdFn { Power, Log, Exp, Sqrt, InvSqrt };

// Principal matrix function f(A) = V diag(f(lambda)) V^T of a symmetric
// matrix. Log, InvSqrt and non-integer powers require A positive definite
// (relative to kSpdTol); Exp accepts any symmetric input.
Matrix spd_fn(const Matrix& a, SpdFn fn, double exponent = 0.0);

Matrix spd_sqrt(const Matrix& a);
Matrix spd_invsqrt(const Matrix& a);
Matrix spd_logm(const Matrix& a);
Matrix sym_expm(const Matrix& a);
Matrix spd_power(const Matrix& a, double t);

// Throws NotPositiveDefinite unless the smallest eigenvalue exceeds
// tol * largest. Returns the decomposition for reuse.
SymEig check_spd(const Matrix& a, const char* what, double tol = kSpdTol);

}  // namespace spsdgeo
