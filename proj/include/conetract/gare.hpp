#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "conetract/flow.hpp"
#include "conetract/rates.hpp"
#include "conetract/riccati.hpp"

namespace conetract {

/// Solution of the generalized algebraic Riccati equation phi(P) = 0 with
/// R + D'P D >> 0, produced by contractive flow iteration plus a Newton
/// polish. The certificate is present only on the certified branch
/// (phi(P0) <= 0 and strict block condition), where the flow provably stays
/// in (0, P0] and contracts at the certified rate.
struct GareSolution {
  SpdMat Pbar;
  double residualNorm = 0.0;
  double feasibilityMargin = 0.0;
  std::optional<RateCertificate> certificate;
  bool heuristic = false;
  int newtonIterations = 0;
  double integrationTime = 0.0;
  /// Thinned flow states traversed on the way to the solution (diagnostics;
  /// lets callers audit the (0, P0] invariance of the certified branch).
  std::vector<std::pair<double, SpdMat>> path;
};

struct VerifyResult {
  bool feasible = false;
  double residualNorm = 0.0;       // meaningful only when feasible
  double feasibilityMargin = 0.0;  // lambda_min(R + D'PD), any sign
};

GareSolution solve_gare(const GrdeParams& p, const SpdMat& P0, double tol);

/// Heuristic start search over P0 = 2^j I; certified when some scale
/// satisfies phi(P0) <= 0, otherwise a flagged best-effort run from I.
GareSolution solve_gare_auto(const GrdeParams& p, double tol);

VerifyResult verify_gare(const GrdeParams& p, const SymMat& P);

/// (1 - e^{-d})/d * m(Q - L'R^{-1}L / Pbar) with d = d_T(P, Pbar); the
/// exponential convergence rate certified towards the GARE solution.
double gare_convergence_bound(const GrdeParams& p, const SpdMat& Pbar, const SpdMat& P);

GareSolution solve_std_are(const StdRiccatiParams& p, const SpdMat& P0, double tol);

}  // namespace conetract
