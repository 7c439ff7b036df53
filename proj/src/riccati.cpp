#include "conetract/riccati.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace conetract {

namespace {

SymMat symmetrized(const Matrix& m) { return SymMat(Matrix(0.5 * (m + m.transpose()))); }

/// Cholesky of R + D'PD; failure of the factorization is the feasibility
/// error signal.
Eigen::LLT<Matrix> feasibility_factor(const GrdeParams& p, const Matrix& P) {
  Matrix s = p.R.mat() + p.D.transpose() * P * p.D;
  s = 0.5 * (s + s.transpose());
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw FeasibilityError("R + D'PD is not positive definite");
  }
  return llt;
}

}  // namespace

GrdeParams::GrdeParams(Matrix A_, Matrix B_, Matrix C_, Matrix D_, Matrix L_, SymMat Q_,
                       SymMat R_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)), L(std::move(L_)),
      Q(std::move(Q_)), R(std::move(R_)) {
  const int nn = n();
  const int kk = k();
  if (A.rows() != nn || A.cols() != nn || C.rows() != nn || C.cols() != nn ||
      B.rows() != nn || D.rows() != nn || D.cols() != kk ||
      L.rows() != kk || L.cols() != nn || Q.dim() != nn || R.dim() != kk) {
    throw DimensionError("GrdeParams: inconsistent coefficient dimensions");
  }
}

SymMat GrdeParams::blockQLR() const {
  const int nn = n(), kk = k();
  Matrix blk(nn + kk, nn + kk);
  blk.topLeftCorner(nn, nn) = Q.mat();
  blk.topRightCorner(nn, kk) = L.transpose();
  blk.bottomLeftCorner(kk, nn) = L;
  blk.bottomRightCorner(kk, kk) = R.mat();
  return SymMat(std::move(blk));
}

bool GrdeParams::wellPosed(double tol) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(blockQLR().mat(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) return false;
  // ker R and ker D intersect trivially iff the stacked [R; D] has full
  // column rank.
  Matrix stack(R.dim() + D.rows(), R.dim());
  stack.topRows(R.dim()) = R.mat();
  stack.bottomRows(D.rows()) = D;
  Eigen::JacobiSVD<Matrix> svd(stack);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 1e-12 * std::max(1.0, sv(0));
}

bool GrdeParams::strictBlock() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(blockQLR().mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

SymMat GrdeParams::schurQ() const {
  Eigen::LLT<Matrix> llt(R.mat());
  if (llt.info() != Eigen::Success) {
    throw FeasibilityError("schurQ: R is not positive definite");
  }
  return symmetrized(Q.mat() - L.transpose() * llt.solve(L));
}

StdRiccatiParams::StdRiccatiParams(Matrix A_, SymMat Sigma_, SymMat Dmat_)
    : A(std::move(A_)), Sigma(std::move(Sigma_)), Dmat(std::move(Dmat_)) {
  if (A.rows() != A.cols() || Sigma.dim() != A.rows() || Dmat.dim() != A.rows()) {
    throw DimensionError("StdRiccatiParams: inconsistent dimensions");
  }
}

bool grde_feasible(const GrdeParams& p, const SymMat& P) {
  detail::require_same_dim(p.n(), P.dim(), "grde_feasible");
  Matrix s = p.R.mat() + p.D.transpose() * P.mat() * p.D;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (s + s.transpose())),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0.0;
}

SymMat grde_phi(const GrdeParams& p, const SymMat& P) {
  detail::require_same_dim(p.n(), P.dim(), "grde_phi");
  const Matrix& Pm = P.mat();
  auto llt = feasibility_factor(p, Pm);
  const Matrix W = p.B.transpose() * Pm + p.D.transpose() * Pm * p.C + p.L;
  const Matrix out = Pm * p.A + p.A.transpose() * Pm + p.C.transpose() * Pm * p.C + p.Q.mat() -
                     W.transpose() * llt.solve(W);
  return symmetrized(out);
}

Matrix grde_gain(const GrdeParams& p, const SymMat& P) {
  detail::require_same_dim(p.n(), P.dim(), "grde_gain");
  const Matrix& Pm = P.mat();
  auto llt = feasibility_factor(p, Pm);
  return llt.solve(p.B.transpose() * Pm + p.D.transpose() * Pm * p.C + p.L);
}

SymMat grde_dphi(const GrdeParams& p, const SymMat& P, const SymMat& Z) {
  detail::require_same_dim(p.n(), P.dim(), "grde_dphi");
  detail::require_same_dim(p.n(), Z.dim(), "grde_dphi");
  const Matrix N = grde_gain(p, P);
  const Matrix& Zm = Z.mat();
  const Matrix ZB = p.B.transpose() * Zm + p.D.transpose() * Zm * p.C;
  const Matrix out = Zm * p.A + p.A.transpose() * Zm + p.C.transpose() * Zm * p.C -
                     ZB.transpose() * N - N.transpose() * ZB +
                     N.transpose() * p.D.transpose() * Zm * p.D * N;
  return symmetrized(out);
}

SymMat grde_defect(const GrdeParams& p, const SymMat& P) {
  const Matrix N = grde_gain(p, P);
  const Matrix out = -p.Q.mat() + N.transpose() * p.L + p.L.transpose() * N -
                     N.transpose() * p.R.mat() * N;
  return symmetrized(out);
}

SymMat std_phi(const StdRiccatiParams& p, const SymMat& P) {
  detail::require_same_dim(p.n(), P.dim(), "std_phi");
  const Matrix& Pm = P.mat();
  return symmetrized(p.A.transpose() * Pm + Pm * p.A + p.Dmat.mat() -
                     Pm * p.Sigma.mat() * Pm);
}

SymMat std_dphi(const StdRiccatiParams& p, const SymMat& P, const SymMat& Z) {
  detail::require_same_dim(p.n(), P.dim(), "std_dphi");
  const Matrix& Pm = P.mat();
  const Matrix& Zm = Z.mat();
  return symmetrized(p.A.transpose() * Zm + Zm * p.A - Zm * p.Sigma.mat() * Pm -
                     Pm * p.Sigma.mat() * Zm);
}

double monotonicity_witness(const VectorField& field, double t, const SpdMat& P,
                            const SymMat& v, const SymMat& q) {
  detail::require_same_dim(P.dim(), v.dim(), "monotonicity_witness");
  detail::require_same_dim(P.dim(), q.dim(), "monotonicity_witness");
  const double pairing = (q.mat().cwiseProduct(v.mat())).sum();
  if (std::abs(pairing) > 1e-10) {
    throw std::invalid_argument("monotonicity_witness: <q, v> must vanish");
  }
  if (!loewner_leq(SymMat::Zero(v.dim()), v) || !loewner_leq(SymMat::Zero(q.dim()), q)) {
    throw std::invalid_argument("monotonicity_witness: v and q must be PSD");
  }
  const SymMat dv = field.dphi(t, P, v);
  return (q.mat().cwiseProduct(dv.mat())).sum();
}

GrdeField::GrdeField(GrdeParams p) { schedule_.emplace_back(0.0, std::move(p)); }

GrdeField::GrdeField(std::vector<std::pair<double, GrdeParams>> schedule)
    : schedule_(std::move(schedule)) {
  if (schedule_.empty()) {
    throw std::invalid_argument("GrdeField: empty schedule");
  }
  for (std::size_t i = 1; i < schedule_.size(); ++i) {
    if (schedule_[i].first <= schedule_[i - 1].first) {
      throw std::invalid_argument("GrdeField: schedule times must be increasing");
    }
    if (schedule_[i].second.n() != schedule_[0].second.n()) {
      throw DimensionError("GrdeField: schedule bundles must share the state dimension");
    }
  }
}

const GrdeParams& GrdeField::paramsAt(double t) const {
  std::size_t idx = 0;
  while (idx + 1 < schedule_.size() && schedule_[idx + 1].first <= t) ++idx;
  return schedule_[idx].second;
}

int GrdeField::dim() const { return schedule_[0].second.n(); }

SymMat GrdeField::phi(double t, const SymMat& P) const { return grde_phi(paramsAt(t), P); }

SymMat GrdeField::dphi(double t, const SymMat& P, const SymMat& Z) const {
  return grde_dphi(paramsAt(t), P, Z);
}

bool GrdeField::feasibleDomain(double t, const SymMat& P) const {
  return grde_feasible(paramsAt(t), P);
}

SymMat StdRiccatiField::phi(double, const SymMat& P) const { return std_phi(p_, P); }

SymMat StdRiccatiField::dphi(double, const SymMat& P, const SymMat& Z) const {
  return std_dphi(p_, P, Z);
}

}  // namespace conetract
