#include "spsdgeo/sym_eig.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "spsdgeo/errors.hpp"

namespace spsdgeo {

namespace {

// Index of the largest-magnitude entry; the first occurrence wins ties so
// the convention is reproducible.
Eigen::Index dominant_entry(const Vector& v) {
  Eigen::Index best = 0;
  double best_abs = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

}  // namespace

void fix_dominant_signs(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Vector col = m.col(j);
    if (col(dominant_entry(col)) < 0.0) m.col(j) = -col;
  }
}

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("sym_eig: matrix must be square");
  if (!a.allFinite()) throw NonFinite("sym_eig: non-finite entries");

  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NonFinite("sym_eig: eigensolver failed");

  const Eigen::Index d = a.rows();
  SymEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    out.vectors.col(j) = solver.eigenvectors().col(d - 1 - j);
  fix_dominant_signs(out.vectors);
  return out;
}

CompactSvd svd_compact(const Matrix& a) {
  if (!a.allFinite()) throw NonFinite("svd_compact: non-finite entries");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CompactSvd out;
  out.u = svd.matrixU();
  out.singular_values = svd.singularValues();
  out.v = svd.matrixV();
  // Flip (u_j, v_j) pairs together; the product U S V^T is unchanged.
  for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
    Vector col = out.u.col(j);
    if (col(dominant_entry(col)) < 0.0) {
      out.u.col(j) = -col;
      out.v.col(j) = -out.v.col(j).eval();
    }
  }
  return out;
}

SymEig check_spd(const Matrix& a, const char* what, double tol) {
  SymEig eig = sym_eig(a);
  const double largest = eig.values(0);
  const double smallest = eig.values(eig.values.size() - 1);
  if (largest <= 0.0 || smallest <= tol * largest)
    throw NotPositiveDefinite(std::string(what) +
                              ": matrix is not positive definite");
  return eig;
}

namespace {

Matrix apply_scalar(const SymEig& eig, double (*f)(double)) {
  Vector mapped = eig.values.unaryExpr(f);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
}

bool is_integer(double t) { return t == std::floor(t); }

}  // namespace

Matrix spd_fn(const Matrix& a, SpdFn fn, double exponent) {
  switch (fn) {
    case SpdFn::Exp: {
      SymEig eig = sym_eig(a);
      return apply_scalar(eig, [](double x) { return std::exp(x); });
    }
    case SpdFn::Log: {
      SymEig eig = check_spd(a, "spd_fn(log)");
      return apply_scalar(eig, [](double x) { return std::log(x); });
    }
    case SpdFn::Sqrt: {
      SymEig eig = sym_eig(a);
      // PSD inputs are fine here; clip eigensolver noise at zero.
      return apply_scalar(eig,
                          [](double x) { return std::sqrt(std::max(x, 0.0)); });
    }
    case SpdFn::InvSqrt: {
      SymEig eig = check_spd(a, "spd_fn(invsqrt)");
      return apply_scalar(eig, [](double x) { return 1.0 / std::sqrt(x); });
    }
    case SpdFn::Power: {
      if (is_integer(exponent) && exponent >= 0.0) {
        SymEig eig = sym_eig(a);
        Vector mapped =
            eig.values.unaryExpr([exponent](double x) { return std::pow(x, exponent); });
        return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
      }
      SymEig eig = check_spd(a, "spd_fn(power)");
      Vector mapped =
          eig.values.unaryExpr([exponent](double x) { return std::pow(x, exponent); });
      return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
    }
  }
  throw Error("spd_fn: unknown function tag");
}

Matrix spd_sqrt(const Matrix& a) { return spd_fn(a, SpdFn::Sqrt); }
Matrix spd_invsqrt(const Matrix& a) { return spd_fn(a, SpdFn::InvSqrt); }
Matrix spd_logm(const Matrix& a) { return spd_fn(a, SpdFn::Log); }
Matrix sym_expm(const Matrix& a) { return spd_fn(a, SpdFn::Exp); }
Matrix spd_power(const Matrix& a, double t) {
  return spd_fn(a, SpdFn::Power, t);
}

}  // namespace spsdgeo
