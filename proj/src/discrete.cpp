#include "conetract/discrete.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <thread>

#include "conetract/sampling.hpp"

namespace conetract {

namespace {

SymMat symmetrized(const Matrix& m) { return SymMat(Matrix(0.5 * (m + m.transpose()))); }

Matrix stack_bd(const DiscreteParams& p) {
  Matrix s(2 * p.n(), p.m());
  s.topRows(p.n()) = p.B;
  s.bottomRows(p.n()) = p.D;
  return s;
}

Matrix stack_ac(const DiscreteParams& p) {
  Matrix s(2 * p.n(), p.n());
  s.topRows(p.n()) = p.A;
  s.bottomRows(p.n()) = p.C;
  return s;
}

}  // namespace

DiscreteParams::DiscreteParams(Matrix A_, Matrix B_, Matrix C_, Matrix D_, SpdMat Q_, SpdMat R_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)), Q(std::move(Q_)),
      R(std::move(R_)) {
  const int nn = n();
  const int mm = m();
  if (A.rows() != nn || A.cols() != nn || C.rows() != nn || C.cols() != nn ||
      B.rows() != nn || D.rows() != nn || D.cols() != mm || Q.dim() != nn || R.dim() != mm) {
    throw DimensionError("DiscreteParams: inconsistent coefficient dimensions");
  }
}

SpdMat apply_F(const DiscreteParams& p, const SpdMat& P) {
  detail::require_same_dim(p.n(), P.dim(), "apply_F");
  const Matrix& Pm = P.mat();
  Matrix G = p.R.mat() + p.B.transpose() * Pm * p.B + p.D.transpose() * Pm * p.D;
  G = 0.5 * (G + G.transpose());
  const Matrix M = p.B.transpose() * Pm * p.A + p.D.transpose() * Pm * p.C;
  const Matrix out = p.A.transpose() * Pm * p.A + p.C.transpose() * Pm * p.C + p.Q.mat() -
                     M.transpose() * Eigen::LLT<Matrix>(G).solve(M);
  return SpdMat(symmetrized(out));
}

SpdMat apply_T(const Matrix& A, const Matrix& B, const SpdMat& Q, const SpdMat& R,
               const SpdMat& P) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  DiscreteParams p(A, B, Matrix::Zero(n, n), Matrix::Zero(n, m), Q, R);
  return apply_F(p, P);
}

SymMat dF(const DiscreteParams& p, const SpdMat& P, const SymMat& Z) {
  detail::require_same_dim(p.n(), P.dim(), "dF");
  detail::require_same_dim(p.n(), Z.dim(), "dF");
  const Matrix& Pm = P.mat();
  Matrix G = p.R.mat() + p.B.transpose() * Pm * p.B + p.D.transpose() * Pm * p.D;
  G = 0.5 * (G + G.transpose());
  const Matrix N =
      Eigen::LLT<Matrix>(G).solve(p.B.transpose() * Pm * p.A + p.D.transpose() * Pm * p.C);
  const Matrix An = p.A - p.B * N;
  const Matrix Cn = p.C - p.D * N;
  return symmetrized(An.transpose() * Z.mat() * An + Cn.transpose() * Z.mat() * Cn);
}

RankFactorization rank_factorization(const Matrix& Mstack, double rankTol) {
  if (Mstack.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("rank_factorization: zero matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(Mstack, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > rankTol * sv(0)) ++r;
  RankFactorization out;
  out.rank = r;
  out.left = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal();
  out.W = svd.matrixV().leftCols(r).transpose();
  return out;
}

SpdMat woodbury_rbar(const Matrix& W, const SpdMat& R) {
  if (W.cols() != R.dim()) throw DimensionError("woodbury_rbar: W and R disagree");
  Eigen::LLT<Matrix> lltR(R.mat());
  Matrix G = W * lltR.solve(W.transpose());
  G = 0.5 * (G + G.transpose());
  Eigen::LLT<Matrix> lltG(G);
  if (lltG.info() != Eigen::Success) {
    throw std::invalid_argument("woodbury_rbar: W is rank deficient");
  }
  const int r = static_cast<int>(W.rows());
  return SpdMat(SymMat(Matrix(lltG.solve(Matrix::Identity(r, r)))));
}

double lgty_gap(const SpdMat& R, const SymMat& X, double delta) {
  detail::require_same_dim(R.dim(), X.dim(), "lgty_gap");
  if (delta < 2.0) throw std::invalid_argument("lgty_gap: delta must be >= 2");
  const Matrix& Xm = X.mat();
  Matrix rx = R.mat() + Xm;
  Eigen::LLT<Matrix> llt(Matrix(0.5 * (rx + rx.transpose())));
  const Matrix inner = llt.solve(Matrix(delta * R.mat() + Xm)) * llt.solve(Xm);
  const Matrix lhs = Xm - Xm * inner;
  const Matrix gap = R.mat() / (4.0 * (delta - 1.0)) - lhs;
  return sym_eigenvalues(symmetrized(gap)).minCoeff();
}

LipschitzReport lipschitz_report(const DiscreteParams& p, double rankTol) {
  LipschitzReport report;
  report.rankTol = rankTol;
  const Matrix ac = stack_ac(p);
  const Matrix bd = stack_bd(p);
  const double acNorm = p.A.norm() + p.C.norm();

  if (bd.cwiseAbs().maxCoeff() == 0.0) {
    // No control channel at all: the consistency equation has a solution
    // only when [A; C] vanishes too, in which case F is the constant map Q.
    if (acNorm == 0.0) {
      report.strict = true;
      report.S = Matrix::Zero(0, p.n());
      report.residual = 0.0;
      report.nu = 0.0;
      report.bound = 0.0;
    }
    return report;
  }

  const RankFactorization rf = rank_factorization(bd, rankTol);
  Eigen::ColPivHouseholderQR<Matrix> qr(rf.left);
  const Matrix S = qr.solve(ac);
  report.residual = (rf.left * S - ac).norm();
  report.strict = report.residual <= rankTol * acNorm;
  if (report.strict) {
    report.S = S;
    const SpdMat rbar = woodbury_rbar(rf.W, p.R);
    const double nu = M_over(symmetrized(S.transpose() * rbar.mat() * S), p.Q);
    report.nu = nu;
    report.bound = nu / std::pow(1.0 + std::sqrt(1.0 + nu), 2);
  }
  return report;
}

double empirical_lipschitz(const DiscreteParams& p, int samplePairs, std::uint64_t seed) {
  if (samplePairs < 1) throw std::invalid_argument("empirical_lipschitz: count must be >= 1");
  const int threads = std::min(thread_cap(), samplePairs);
  std::vector<double> partial(threads, 0.0);
  auto work = [&](int tid) {
    double best = 0.0;
    for (int i = tid; i < samplePairs; i += threads) {
      // Per-sample engine: the draw sequence is independent of the thread
      // layout, so results reproduce for any CONE_CONTRACTION_THREADS.
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1));
      const SpdMat p1 = random_spd(p.n(), rng, 0.05, 20.0);
      const SpdMat p2 = random_spd(p.n(), rng, 0.05, 20.0);
      const double d = thompson_distance(p1, p2);
      if (d < 1e-10) continue;
      best = std::max(best, thompson_distance(apply_F(p, p1), apply_F(p, p2)) / d);
    }
    partial[tid] = best;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  return *std::max_element(partial.begin(), partial.end());
}

double directed_lipschitz_probe(const DiscreteParams& p, int ladderSteps, std::uint64_t seed) {
  if (ladderSteps < 1) throw std::invalid_argument("directed_lipschitz_probe: steps must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<SpdMat, SpdMat>> basePairs;
  const SpdMat base = random_spd(p.n(), rng, 0.5, 2.0);
  basePairs.emplace_back(base, SpdMat(SymMat(Matrix(2.0 * base.mat()))));
  basePairs.emplace_back(random_spd(p.n(), rng, 0.5, 2.0), random_spd(p.n(), rng, 0.5, 2.0));

  double best = 0.0;
  for (const auto& [p1, p2] : basePairs) {
    const double d = thompson_distance(p1, p2);
    if (d < 1e-10) continue;
    for (int j = 0; j <= ladderSteps; ++j) {
      for (double scale : {std::ldexp(1.0, j), std::ldexp(1.0, -j)}) {
        const SpdMat s1{SymMat(Matrix(scale * p1.mat()))};
        const SpdMat s2{SymMat(Matrix(scale * p2.mat()))};
        best = std::max(best, thompson_distance(apply_F(p, s1), apply_F(p, s2)) / d);
      }
    }
  }
  return best;
}

SpdMat iterate_to_fixed_point(const DiscreteParams& p, const SpdMat& P0, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("iterate_to_fixed_point: tol must be positive");
  const LipschitzReport report = lipschitz_report(p);
  SpdMat P = P0;
  SpdMat next = apply_F(p, P);
  double gap = thompson_distance(next, P);
  long budget;
  if (report.strict && report.bound > 0.0) {
    budget = static_cast<long>(std::ceil(std::log(std::max(gap, tol) / (tol * (1.0 - report.bound))) /
                                         std::log(1.0 / report.bound))) + 50;
  } else if (report.strict) {
    budget = 2;  // constant map
  } else {
    budget = 100000;  // best effort, flagged by the caller via report.strict
  }
  for (long i = 0; i < budget && gap >= tol; ++i) {
    P = next;
    next = apply_F(p, P);
    gap = thompson_distance(next, P);
    if (P.mat().norm() > 1e8) {
      throw std::runtime_error("iterate_to_fixed_point: iteration diverged");
    }
  }
  if (gap >= tol) {
    throw std::runtime_error("iterate_to_fixed_point: no convergence within budget");
  }
  return next;
}

}  // namespace conetract
