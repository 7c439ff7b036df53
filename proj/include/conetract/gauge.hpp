#pragma once

#include <functional>
#include <string>
#include <vector>

#include "conetract/matrix_types.hpp"
#include "conetract/riccati.hpp"

namespace conetract {

/// Symmetric gauge function: a p-norm on eigenvalue vectors, p in [1, inf].
/// PNorm(inf) and Sup evaluate identically.
struct GaugeFunction {
  enum class Kind { PNorm, SupNorm };
  Kind kind = Kind::SupNorm;
  double p = 0.0;  // meaningful for PNorm only

  static GaugeFunction pnorm(double p);
  static GaugeFunction sup() { return GaugeFunction{Kind::SupNorm, 0.0}; }

  bool isSup() const;
  std::string name() const;  // "sup", "p1", "p2", "p1.5", ...
};

/// One element of the subdifferential of a gauge at an anchor point;
/// satisfies <mu, lambda> = nu(lambda) and mu_i lambda_i >= 0.
struct Subgradient {
  Vector mu;
};

double gauge_eval(const GaugeFunction& nu, const Vector& lambda);

/// Deterministic subgradient selection: lowest index wins sup-norm ties,
/// zero coordinates get zero weight for p = 1.
Subgradient gauge_subgradient(const GaugeFunction& nu, const Vector& lambda);

/// Spectral extension nu_hat(P) = nu(eigenvalues(P)); convex by Lewis'
/// theorem.
double spectral_gauge(const GaugeFunction& nu, const SymMat& P);

/// Invariant Finsler metric d_nu(P,Q) = nu_hat(log(P^{-1/2} Q P^{-1/2})).
/// Coincides with the Thompson metric for the sup-norm gauge.
double finsler_distance(const GaugeFunction& nu, const SpdMat& P, const SpdMat& Q);

/// <diag(mu), DPhi(I).diag(lambda) - diag(lambda) Phi(I)> under the trace
/// pairing. A strictly positive value certifies that d_nu non-expansiveness
/// fails for the flow of the field linearized by fieldLin.
double necessary_condition_value(const std::function<SymMat(const SymMat&)>& fieldLin,
                                 const SymMat& phiAtI, const Vector& lambda,
                                 const Subgradient& mu);

/// The GRDE parameter family that falsifies non-expansiveness in every
/// invariant Finsler metric except the Thompson one. Normalized so that
/// R + D'D = I, B' + D'C = I and C - D = [[I, e], [0, 0]].
GrdeParams build_counterexample(int n, double epsilon, const Vector& e);

struct AuditGrid {
  std::vector<double> epsilons;
  std::vector<double> lambdaLast;  // value of lambda_n; lambda_1..n-1 fixed at 1
  Vector e;

  static AuditGrid defaults(int n);
};

struct AuditWitness {
  double epsilon;
  Vector e;
  Vector lambda;
  Vector mu;
  double value;
};

struct ViolationReport {
  std::string gauge;
  std::vector<AuditWitness> witnesses;  // strictly positive values, descending
  double maxValue;                      // max over the whole grid (any sign)
  AuditWitness maxWitness;              // grid point achieving maxValue
};

/// Scan the counterexample family over (epsilon, lambda) and report every
/// grid point whose necessary-condition value is strictly positive. The
/// linearization is evaluated numerically through the GRDE derivative, not
/// through a transcribed closed form.
ViolationReport audit_nonexpansiveness(const GaugeFunction& nu, int n, const AuditGrid& grid);

}  // namespace conetract
