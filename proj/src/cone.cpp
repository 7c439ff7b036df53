#include "conetract/cone.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace conetract {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> decompose(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  return es;
}

/// V f(diag) V' for a spectral function f.
template <typename F>
Matrix spectral_map(const SymMat& s, F&& f) {
  auto es = decompose(s.mat());
  Vector d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d(i) = f(d(i));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Vector sym_eigenvalues(const SymMat& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  return es.eigenvalues();
}

Matrix spd_inv_sqrt(const SpdMat& p) {
  return spectral_map(p.sym(), [](double x) { return 1.0 / std::sqrt(x); });
}

double m_over(const SymMat& x, const SpdMat& y) {
  detail::require_same_dim(x.dim(), y.dim(), "m_over");
  const Matrix w = spd_inv_sqrt(y);
  return sym_eigenvalues(SymMat(Matrix(w * x.mat() * w))).minCoeff();
}

double M_over(const SymMat& x, const SpdMat& y) {
  detail::require_same_dim(x.dim(), y.dim(), "M_over");
  const Matrix w = spd_inv_sqrt(y);
  return sym_eigenvalues(SymMat(Matrix(w * x.mat() * w))).maxCoeff();
}

double thompson_distance(const SpdMat& a, const SpdMat& b) {
  detail::require_same_dim(a.dim(), b.dim(), "thompson_distance");
  const double grow = M_over(a.sym(), b);
  const double shrink = M_over(b.sym(), a);
  // max(M(a/b), M(b/a)) >= 1; clamp the log against round-off at equality.
  return std::max(0.0, std::log(std::max(grow, shrink)));
}

bool loewner_leq(const SymMat& a, const SymMat& b, double tol) {
  detail::require_same_dim(a.dim(), b.dim(), "loewner_leq");
  if (tol < 0.0) throw std::invalid_argument("loewner_leq: tol must be >= 0");
  return sym_eigenvalues(b - a).minCoeff() >= -tol;
}

bool loewner_leq(const SymMat& a, const SymMat& b) {
  detail::require_same_dim(a.dim(), b.dim(), "loewner_leq");
  const Vector ev = sym_eigenvalues(b - a);
  return ev.minCoeff() >= -kPsdRelTol * ev.cwiseAbs().maxCoeff();
}

SpdMat spd_sqrt(const SpdMat& p) {
  return SpdMat(SymMat(spectral_map(p.sym(), [](double x) { return std::sqrt(x); })));
}

SymMat spd_log(const SpdMat& p) {
  return SymMat(spectral_map(p.sym(), [](double x) { return std::log(x); }));
}

SpdMat spd_inv(const SpdMat& p) {
  return SpdMat(SymMat(spectral_map(p.sym(), [](double x) { return 1.0 / x; })));
}

}  // namespace conetract
