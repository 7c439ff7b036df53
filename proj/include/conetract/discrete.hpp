#pragma once

#include <cstdint>
#include <optional>

#include "conetract/cone.hpp"
#include "conetract/matrix_types.hpp"

namespace conetract {

/// Coefficients of the discrete generalized Riccati operator
///   F(P) = A'PA + C'PC + Q - (B'PA + D'PC)'(R + B'PB + D'PD)^{-1}(B'PA + D'PC)
/// with Q and R strictly positive definite.
struct DiscreteParams {
  Matrix A, C;  // n x n
  Matrix B, D;  // n x m
  SpdMat Q;     // n
  SpdMat R;     // m

  DiscreteParams(Matrix A_, Matrix B_, Matrix C_, Matrix D_, SpdMat Q_, SpdMat R_);
  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

SpdMat apply_F(const DiscreteParams& p, const SpdMat& P);

/// Standard discrete operator T(P) = A'PA + Q - A'PB(R + B'PB)^{-1}B'PA;
/// equals F with C = D = 0.
SpdMat apply_T(const Matrix& A, const Matrix& B, const SpdMat& Q, const SpdMat& R,
               const SpdMat& P);

/// Exact derivative DF(P).Z = (A - BN)'Z(A - BN) + (C - DN)'Z(C - DN).
SymMat dF(const DiscreteParams& p, const SpdMat& P, const SymMat& Z);

struct RankFactorization {
  Matrix left;  // full column rank
  Matrix W;     // full row rank
  int rank = 0;
};

/// SVD-based rank factorization Mstack = left * W, truncating singular values
/// below rankTol * sigma_max.
RankFactorization rank_factorization(const Matrix& Mstack, double rankTol);

/// Rbar = (W R^{-1} W')^{-1} from the Woodbury reduction of the operator to
/// full-column-rank inputs.
SpdMat woodbury_rbar(const Matrix& W, const SpdMat& R);

/// lambda_min(R/(4(delta-1)) - [X - X(R+X)^{-1}(delta R + X)(R+X)^{-1}X]);
/// nonnegative for delta >= 2.
double lgty_gap(const SpdMat& R, const SymMat& X, double delta);

struct LipschitzReport {
  bool nonExpansive = true;  // always true: lip(F) <= 1 unconditionally
  bool strict = false;
  std::optional<Matrix> S;   // m-reduced solution of [A;C] = [Bbar;Dbar] S
  double residual = 0.0;     // least-squares residual of the S-equation
  std::optional<double> nu;  // M(S' Rbar S / Q) when strict
  double bound = 1.0;        // nu/(1+sqrt(1+nu))^2 when strict, else 1
  double rankTol = 0.0;
};

/// Decide strict contraction of F via the rank-factorized consistency
/// equation [A;C] = [Bbar;Dbar] S and produce the closed-form Lipschitz
/// bound. The strictness call is tolerance-sensitive; the report carries the
/// residual so borderline cases can be judged by the caller.
LipschitzReport lipschitz_report(const DiscreteParams& p, double rankTol = 1e-10);

/// Max of d_T(F(P1), F(P2)) / d_T(P1, P2) over random SPD pairs.
double empirical_lipschitz(const DiscreteParams& p, int samplePairs, std::uint64_t seed);

/// Directed variant scaling base pairs along geometric ladders in both
/// directions; approaches the supremum 1 on non-strict instances where
/// uniform sampling badly underestimates it.
double directed_lipschitz_probe(const DiscreteParams& p, int ladderSteps, std::uint64_t seed);

/// Banach iteration P <- F(P) until d_T(F(P), P) < tol. On strict instances
/// the iteration budget follows from the closed-form bound; otherwise a
/// best-effort loop with divergence detection.
SpdMat iterate_to_fixed_point(const DiscreteParams& p, const SpdMat& P0, double tol);

}  // namespace conetract
