#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conetract/flow.hpp"
#include "conetract/matrix_types.hpp"
#include "conetract/riccati.hpp"

namespace conetract {

enum class RateMethod {
  generalSupFormula,
  stdGlobalClosedForm,
  grdeLocalClosedForm,
  indefiniteSigmaBox,
  degenerateSigma,
  orthantInfimum,
  fixedPointFormula,
};

enum class RateRigor { closedForm, sampledEstimate };

const char* to_string(RateMethod m);
const char* to_string(RateRigor r);

struct RateWitness {
  Matrix point;       // sample matrix, or a 1 x m row for scalar witnesses
  double time = 0.0;  // sample time (0 for autonomous data)
  double value = 0.0; // functional value achieved at the witness
  std::string kind;   // "sample", "lambda", "component", ...
};

/// A claimed contraction/convergence rate with its domain and provenance.
/// closedForm certificates are true lower bounds on the achievable
/// contraction per the underlying theorem; sampledEstimate certificates are
/// upper estimates of the best rate obtained from a finite sample and are
/// never guarantees. The soundness field spells the direction out.
struct RateCertificate {
  double rate = 0.0;
  std::string domain;
  RateMethod method = RateMethod::generalSupFormula;
  RateRigor rigor = RateRigor::sampledEstimate;
  std::string soundness;
  std::vector<RateWitness> witnesses;
  std::uint64_t seed = 0;
};

/// Deterministic sample generator over cone domains. Order-interval sampling
/// draws P = lo + S^{1/2} W S^{1/2} with S = hi - lo and W a random symmetric
/// contraction, so every sample lies in the declared interval; ray scaling
/// multiplies base points into (0, 1] to exploit the scale structure of the
/// rate theorems.
class DomainSampler {
 public:
  static DomainSampler orderIntervalUniform(std::optional<SpdMat> lo, SpdMat hi, int count,
                                            std::uint64_t seed);
  static DomainSampler rayScaling(std::vector<SpdMat> base, std::vector<double> scales);
  static DomainSampler userList(std::vector<SpdMat> points, std::string description = "user list");

  std::vector<SpdMat> sample() const;
  std::uint64_t seed() const { return seed_; }
  const std::string& domainDescription() const { return description_; }

 private:
  DomainSampler() = default;

  enum class Strategy { orderInterval, rayScaling, userList } strategy_ = Strategy::userList;
  std::optional<SpdMat> lo_;
  std::optional<SpdMat> hi_;
  int count_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<SpdMat> base_;
  std::vector<double> scales_;
  std::string description_;
};

/// Sampled evaluation of the general rate formula
///   alpha = -sup_{s,x} M((Dphi_s(x)x - phi(s,x)) / x).
RateCertificate general_rate_estimate(const VectorField& field, const DomainSampler& sampler,
                                      const std::vector<double>& times);

/// Closed-form global rate of the standard Riccati flow with PSD
/// coefficients: alpha = 2 sqrt(m(Sigma^{1/2} Dmat Sigma^{1/2} / I)).
RateCertificate std_global_rate(const SymMat& Sigma, const SymMat& Dmat);

/// Sampled sup of beta in P Sigma P + Dmat >= beta P; cross-validates the
/// closed form above.
RateCertificate std_beta_rate(const SymMat& Sigma, const SymMat& Dmat,
                              const DomainSampler& sampler);

/// alpha = m(Q - L'R^{-1}L / P0), valid on any subset of (0, P0] closed under
/// scaling into (0, 1]. Requires the strict block condition.
RateCertificate grde_local_rate(const GrdeParams& p, const SpdMat& P0);

/// Local contraction analysis for the standard Riccati flow with indefinite
/// Sigma, from the scalar bounds A + A' <= -2 cA I, mD I <= D <= cD I,
/// Sigma >= -cSigma I.
struct IndefiniteSigmaAnalysis {
  bool hypothesesHold = false;
  std::string diagnostic;   // names the violated hypothesis when not holding
  double lambdaLo = 0.0;    // admissible interval [lambdaLo, lambdaHi)
  double lambdaHi = 0.0;
  double cA = 0, cD = 0, mD = 0, cSigma = 0;

  bool contains(double lambda) const;
  double rateAt(double lambda) const;  // (mD - cSigma lambda^2) / lambda
};

IndefiniteSigmaAnalysis indefinite_sigma_analysis(double cA, double cD, double mD, double cSigma);

/// Certificate on (0, lambda I] built from a successful analysis.
RateCertificate indefinite_sigma_rate(const IndefiniteSigmaAnalysis& a, double lambda);

/// Rate for Sigma PSD singular: min(m(I/P), cA/cD) * mD.
double degenerate_sigma_rate(double cA, double cD, double mD, const SpdMat& P);

/// Order-preserving field on the open positive orthant with Jacobian
/// supplied analytically or approximated by central differences.
struct OrthantField {
  std::function<Vector(double, const Vector&)> phi;
  std::function<Matrix(double, const Vector&)> jacobian;  // may be empty
  double fdStep = 1e-6;

  Matrix jacobianAt(double t, const Vector& x) const;
};

/// alpha = inf over (s, x, i) of -x_i^{-1} [sum_j dphi_i/dx_j x_j - phi_i].
RateCertificate orthant_rate(const OrthantField& field, const std::vector<Vector>& samples,
                             const std::vector<double>& times);

/// Convergence rate towards a zero of a time-independent field:
///   alpha = inf_{1/mu < lambda < mu} m(-(lambda ln lambda)^{-1} phi(lambda xbar) / xbar),
/// evaluated on the supplied grid and augmented with the analytic lambda -> 1
/// limit m(-Dphi(xbar) xbar / xbar).
RateCertificate fixed_point_rate(const VectorField& field, const SpdMat& xbar, double mu,
                                 const std::vector<double>& lambdaGrid);

}  // namespace conetract
