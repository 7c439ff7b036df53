#include "conetract/gare.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

#include "conetract/cone.hpp"

namespace conetract {

namespace {

// Basis of Sym(n) indexed over the upper triangle; used to assemble the
// linearization for the Newton polish.
std::vector<SymMat> sym_basis(int n) {
  std::vector<SymMat> basis;
  basis.reserve(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = e(j, i) = 1.0;
      basis.emplace_back(std::move(e));
    }
  }
  return basis;
}

Vector vech(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Vector v(n * (n + 1) / 2);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v(idx++) = m(i, j);
  return v;
}

bool spd_ok(const Matrix& y) {
  Eigen::LLT<Matrix> llt(y);
  return llt.info() == Eigen::Success;
}

double residual_of(const VectorField& field, const SymMat& P) {
  return field.phi(0.0, P).mat().norm();
}

/// One Newton stage: solve dphi(P, Delta) = -phi(P) in symmetric coordinates
/// with a rank-revealing least-squares factorization, then backtrack until
/// the residual decreases and the iterate stays feasible and positive
/// definite. Returns false when no progress is possible (caller falls back
/// to the flow).
bool newton_polish(const VectorField& field, SymMat& P, double tol, int& itersUsed) {
  const int n = P.dim();
  const auto basis = sym_basis(n);
  const int m = static_cast<int>(basis.size());
  double res = residual_of(field, P);
  for (int iter = 0; iter < 60 && res >= tol; ++iter) {
    Matrix J(m, m);
    for (int col = 0; col < m; ++col) {
      J.col(col) = vech(field.dphi(0.0, P, basis[col]).mat());
    }
    const Vector rhs = -vech(field.phi(0.0, P).mat());
    Eigen::ColPivHouseholderQR<Matrix> qr(J);
    if (qr.rank() < m) return false;  // singular linearization, pure flow instead
    const Vector delta = qr.solve(rhs);

    bool advanced = false;
    double step = 1.0;
    for (int back = 0; back < 12; ++back, step *= 0.5) {
      Matrix cand = P.mat();
      int idx = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          cand(i, j) += step * delta(idx);
          if (i != j) cand(j, i) += step * delta(idx);
          ++idx;
        }
      }
      const SymMat candSym{std::move(cand)};
      if (!spd_ok(candSym.mat()) || !field.feasibleDomain(0.0, candSym)) continue;
      const double candRes = residual_of(field, candSym);
      if (candRes < res) {
        P = candSym;
        res = candRes;
        ++itersUsed;
        advanced = true;
        break;
      }
    }
    if (!advanced) return res < tol;
  }
  return res < tol;
}

struct FlowSolveSettings {
  double horizon;
  double chunk;
  double divergenceNorm = 1e6;
};

/// Flow iteration with early Newton polish: integrate in chunks, attempt the
/// polish once the residual falls under sqrt(tol).
void flow_newton_solve(const VectorField& field, SymMat& P, double tol,
                       const FlowSolveSettings& st, GareSolution& sol) {
  IntegrationConfig cfg;
  cfg.recordEvery = st.chunk;  // thin recording, the chunk ends matter
  double res = residual_of(field, P);
  const double polishGate = std::sqrt(tol);
  double tDone = 0.0;
  while (res >= tol) {
    if (res < polishGate && newton_polish(field, P, tol, sol.newtonIterations)) {
      res = residual_of(field, P);
      break;
    }
    if (tDone >= st.horizon) {
      // Last chance before declaring failure.
      if (newton_polish(field, P, tol, sol.newtonIterations)) {
        res = residual_of(field, P);
        break;
      }
      throw std::runtime_error("gare solve: iteration budget exhausted, residual " +
                               std::to_string(res));
    }
    const double step = std::min(st.chunk, st.horizon - tDone);
    Trajectory traj = integrate(field, SpdMat(P), 0.0, step, cfg);
    if (traj.exitReason != ExitReason::horizonReached) {
      throw DomainExitError(tDone + traj.exitTime.value_or(0.0), traj.exitReason);
    }
    P = traj.finalState().sym();
    tDone += step;
    sol.integrationTime = tDone;
    sol.path.emplace_back(tDone, traj.finalState());
    if (P.mat().norm() > st.divergenceNorm) {
      throw std::runtime_error("gare solve: flow iterate diverged");
    }
    res = residual_of(field, P);
  }
  sol.residualNorm = res;
}

}  // namespace

VerifyResult verify_gare(const GrdeParams& p, const SymMat& P) {
  detail::require_same_dim(p.n(), P.dim(), "verify_gare");
  VerifyResult out;
  Matrix s = p.R.mat() + p.D.transpose() * P.mat() * p.D;
  out.feasibilityMargin = sym_eigenvalues(SymMat(Matrix(0.5 * (s + s.transpose())))).minCoeff();
  out.feasible = out.feasibilityMargin > 0.0;
  if (out.feasible) {
    out.residualNorm = grde_phi(p, P).mat().norm();
  }
  return out;
}

double gare_convergence_bound(const GrdeParams& p, const SpdMat& Pbar, const SpdMat& P) {
  const VerifyResult check = verify_gare(p, Pbar);
  if (!check.feasible || check.residualNorm > 1e-8) {
    throw std::invalid_argument("gare_convergence_bound: Pbar is not a GARE solution");
  }
  const double d = thompson_distance(P, Pbar);
  const double factor = d < 1e-14 ? 1.0 : (1.0 - std::exp(-d)) / d;
  return factor * m_over(p.schurQ(), Pbar);
}

GareSolution solve_gare(const GrdeParams& p, const SpdMat& P0, double tol) {
  detail::require_same_dim(p.n(), P0.dim(), "solve_gare");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_gare: tol must be positive");
  if (!grde_feasible(p, P0)) {
    throw FeasibilityError("solve_gare: R + D'P0 D is not positive definite");
  }
  const GrdeField field(p);

  GareSolution sol{P0};
  const double phiTop = sym_eigenvalues(grde_phi(p, P0)).maxCoeff();
  const bool certified = p.strictBlock() && phiTop <= 1e-8;

  FlowSolveSettings st{};
  if (certified) {
    sol.certificate = grde_local_rate(p, P0);
    const double alpha = sol.certificate->rate;
    st.horizon = 50.0 / alpha;
    st.chunk = std::min(2.0 / alpha, st.horizon);
  } else {
    sol.heuristic = true;
    st.horizon = 1e3;
    st.chunk = 10.0;
  }

  SymMat P = P0.sym();
  flow_newton_solve(field, P, tol, st, sol);
  sol.Pbar = SpdMat(P);
  const VerifyResult check = verify_gare(p, P);
  sol.residualNorm = check.residualNorm;
  sol.feasibilityMargin = check.feasibilityMargin;
  return sol;
}

GareSolution solve_gare_auto(const GrdeParams& p, double tol) {
  // Scale the identity upward until phi(P0) <= 0; there is no closed-form
  // recipe for an admissible P0, so this search is a flagged heuristic.
  for (int j = 0; j <= 20; ++j) {
    const SpdMat candidate{SymMat(Matrix(std::ldexp(1.0, j) * Matrix::Identity(p.n(), p.n())))};
    if (!grde_feasible(p, candidate)) continue;
    if (sym_eigenvalues(grde_phi(p, candidate)).maxCoeff() <= 1e-8) {
      return solve_gare(p, candidate, tol);
    }
  }
  return solve_gare(p, SpdMat::Identity(p.n()), tol);
}

GareSolution solve_std_are(const StdRiccatiParams& p, const SpdMat& P0, double tol) {
  detail::require_same_dim(p.n(), P0.dim(), "solve_std_are");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_std_are: tol must be positive");
  const StdRiccatiField field(p);

  GareSolution sol{P0};
  std::optional<RateCertificate> cert;
  try {
    RateCertificate c = std_global_rate(p.Sigma, p.Dmat);
    if (c.rate > 0.0) cert = std::move(c);
  } catch (const HypothesisError&) {
    // indefinite coefficients: no global certificate
  }

  FlowSolveSettings st{};
  if (cert.has_value()) {
    sol.certificate = cert;
    st.horizon = 50.0 / cert->rate;
    st.chunk = std::min(2.0 / cert->rate, st.horizon);
  } else {
    sol.heuristic = true;
    st.horizon = 1e3;
    st.chunk = 10.0;
  }

  SymMat P = P0.sym();
  flow_newton_solve(field, P, tol, st, sol);
  sol.Pbar = SpdMat(P);
  sol.residualNorm = residual_of(field, P);
  sol.feasibilityMargin = sol.Pbar.minEig();
  return sol;
}

}  // namespace conetract
