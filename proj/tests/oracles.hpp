// Shared test oracles: independent reference computations the suites freeze
// expected values against. Everything here stays independent of the library
// code paths it checks (bisection instead of eigenvalues, finite differences
// instead of closed-form derivatives, direct transcriptions instead of the
// shared kernels).
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "conetract/cone.hpp"
#include "conetract/matrix_types.hpp"
#include "conetract/riccati.hpp"
#include "conetract/sampling.hpp"

namespace oracles {

using conetract::GrdeParams;
using conetract::Matrix;
using conetract::SpdMat;
using conetract::SymMat;
using conetract::Vector;

inline double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.transpose())),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.transpose())),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Bisection on the PSD membership predicate {t : t y - x PSD}; independent
/// of the spectral route used by M_over.
inline double M_over_bisect(const SymMat& x, const SpdMat& y, double tol = 1e-12) {
  const double bound = 1.0 + x.mat().norm() / min_eig(y.mat());
  double lo = -bound, hi = bound;
  while (min_eig(hi * y.mat() - x.mat()) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (min_eig(mid * y.mat() - x.mat()) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Literal right-hand side of the generalized Riccati equation, transcribed
/// directly from the coefficient list.
inline Matrix grde_rhs_transcription(const Matrix& A, const Matrix& B, const Matrix& C,
                                     const Matrix& D, const Matrix& L, const Matrix& Q,
                                     const Matrix& R, const Matrix& P) {
  const Matrix gain = (R + D.transpose() * P * D).inverse() *
                      (B.transpose() * P + D.transpose() * P * C + L);
  return P * A + A.transpose() * P + C.transpose() * P * C + Q -
         (P * B + C.transpose() * P * D + L.transpose()) * gain;
}

/// Central finite difference of a matrix field.
template <typename Phi>
Matrix central_difference(Phi&& phi, const Matrix& P, const Matrix& Z, double h) {
  return (phi(Matrix(P + h * Z)) - phi(Matrix(P - h * Z))) / (2.0 * h);
}

inline SymMat random_sym(int n, std::mt19937_64& rng, double scale = 1.0) {
  const Matrix g = conetract::random_gaussian(n, n, rng);
  return SymMat(Matrix(scale * 0.5 * (g + g.transpose())));
}

/// Orthogonal PSD pair built from complementary projectors: <q, v> = 0 holds
/// exactly up to round-off.
inline std::pair<SymMat, SymMat> orthogonal_psd_pair(int n, std::mt19937_64& rng) {
  const Matrix u = conetract::random_orthonormal(n, rng);
  std::uniform_int_distribution<int> split(1, n - 1);
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  const int r = n >= 2 ? split(rng) : 1;
  Matrix v = Matrix::Zero(n, n);
  Matrix q = Matrix::Zero(n, n);
  for (int i = 0; i < r; ++i) v += weight(rng) * u.col(i) * u.col(i).transpose();
  for (int i = r; i < n; ++i) q += weight(rng) * u.col(i) * u.col(i).transpose();
  return {SymMat(std::move(v)), SymMat(std::move(q))};
}

/// Random bundle satisfying the block-PSD well-posedness condition with
/// R strictly positive definite.
inline GrdeParams random_well_posed_grde(int n, int k, std::mt19937_64& rng) {
  const Matrix A = conetract::random_gaussian(n, n, rng) * 0.5 - Matrix::Identity(n, n);
  const Matrix B = conetract::random_gaussian(n, k, rng) * 0.5;
  const Matrix C = conetract::random_gaussian(n, n, rng) * 0.5;
  const Matrix D = conetract::random_gaussian(n, k, rng) * 0.5;
  const Matrix X = conetract::random_gaussian(n + k, n + k, rng);
  const Matrix block = X.transpose() * X;
  const SymMat Q{Matrix(block.topLeftCorner(n, n))};
  const Matrix L = block.bottomLeftCorner(k, n);
  const SymMat R{Matrix(block.bottomRightCorner(k, k) + 0.2 * Matrix::Identity(k, k))};
  return GrdeParams(A, B, C, D, L, Q, R);
}

/// Strict-block bundle with phi(P0) <= -margin * I, so (0, P0] is invariant
/// and the local contraction certificate applies along the whole flow.
inline GrdeParams random_invariant_strict_grde(int n, int k, const SpdMat& P0,
                                               std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double shift = 2.0 + 0.5 * n + static_cast<double>(attempt) * 0.25;
    const Matrix A = conetract::random_gaussian(n, n, rng) * 0.4 - shift * Matrix::Identity(n, n);
    const Matrix B = conetract::random_gaussian(n, k, rng) * 0.4;
    const Matrix C = conetract::random_gaussian(n, n, rng) * 0.4;
    const Matrix D = conetract::random_gaussian(n, k, rng) * 0.4;
    const Matrix L = conetract::random_gaussian(k, n, rng) * 0.2;
    const Matrix Rg = conetract::random_gaussian(k, k, rng);
    const Matrix R = Rg.transpose() * Rg + 0.5 * Matrix::Identity(k, k);

    const Matrix& Pm = P0.mat();
    const Matrix W0 = B.transpose() * Pm + D.transpose() * Pm * C + L;
    const Matrix G0 = Pm * A + A.transpose() * Pm + C.transpose() * Pm * C -
                      W0.transpose() * (R + D.transpose() * Pm * D).inverse() * W0;
    const Matrix lrl = L.transpose() * R.inverse() * L;
    const Matrix S = -0.5 * (G0 + G0.transpose()) - lrl;
    if (min_eig(S) <= 0.05) continue;
    const Matrix Q = lrl + 0.8 * S;
    return GrdeParams(A, B, C, D, L, SymMat(Matrix(0.5 * (Q + Q.transpose()))), SymMat(R));
  }
  throw std::runtime_error("random_invariant_strict_grde: generator failed");
}

/// Least-squares slope of log(values) against times; the negated slope is the
/// measured decay exponent.
inline double decay_exponent(const std::vector<std::pair<double, double>>& series,
                             double floor = 1e-10) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int m = 0;
  for (const auto& [t, d] : series) {
    if (d <= floor) break;  // converged to the noise floor; the tail is uninformative
    const double y = std::log(d);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++m;
  }
  if (m < 2) return 0.0;
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  return -slope;
}

inline std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
  return out;
}

}  // namespace oracles
