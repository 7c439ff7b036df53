#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "conetract/cone.hpp"
#include "conetract/matrix_types.hpp"

namespace conetract {

/// Coefficient bundle (A,B,C,D,L,Q,R) of the generalized Riccati vector field
///   phi(P) = PA + A'P + C'PC + Q - (B'P + D'PC + L)'(R + D'PD)^{-1}(B'P + D'PC + L)
/// with A,C n x n, B,D n x k, L k x n, Q in Sym(n), R in Sym(k).
struct GrdeParams {
  Matrix A, B, C, D, L;
  SymMat Q;
  SymMat R;

  GrdeParams(Matrix A_, Matrix B_, Matrix C_, Matrix D_, Matrix L_, SymMat Q_, SymMat R_);

  int n() const { return static_cast<int>(A.rows()); }
  int k() const { return static_cast<int>(B.cols()); }

  /// The block matrix [[Q, L'], [L, R]] whose sign structure drives
  /// non-expansiveness and local contraction.
  SymMat blockQLR() const;

  /// Block PSD plus ker R `intersect` ker D = {0}.
  bool wellPosed(double tol = 1e-10) const;

  /// Block strictly positive definite.
  bool strictBlock() const;

  /// Q - L'R^{-1}L; requires R invertible.
  SymMat schurQ() const;
};

/// Standard Riccati coefficients: phi(P) = A'P + PA + Dmat - P Sigma P.
struct StdRiccatiParams {
  Matrix A;
  SymMat Sigma;
  SymMat Dmat;

  StdRiccatiParams(Matrix A_, SymMat Sigma_, SymMat Dmat_);
  int n() const { return static_cast<int>(A.rows()); }
};

/// A time-dependent vector field on Sym(n) together with its exact
/// directional derivative and feasibility predicate. phi and dphi accept any
/// symmetric argument inside the feasible domain; positive definiteness of
/// flow states is enforced by the integrator, not here.
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual int dim() const = 0;
  virtual SymMat phi(double t, const SymMat& P) const = 0;
  virtual SymMat dphi(double t, const SymMat& P, const SymMat& Z) const = 0;
  virtual bool feasibleDomain(double t, const SymMat& P) const = 0;
};

// Generalized Riccati field operations (time-constant coefficient bundle).
bool grde_feasible(const GrdeParams& p, const SymMat& P);
SymMat grde_phi(const GrdeParams& p, const SymMat& P);
Matrix grde_gain(const GrdeParams& p, const SymMat& P);  // N(P), k x n
SymMat grde_dphi(const GrdeParams& p, const SymMat& P, const SymMat& Z);

/// The defect Dphi(P)P - phi(P) in the factored closed form
/// -Q + N'L + L'N - N'RN. Negative semidefinite whenever the params are
/// well-posed; its M-functional against P determines the contraction rate.
SymMat grde_defect(const GrdeParams& p, const SymMat& P);

SymMat std_phi(const StdRiccatiParams& p, const SymMat& P);
SymMat std_dphi(const StdRiccatiParams& p, const SymMat& P, const SymMat& Z);

/// <q, Dphi_t(P) v> for an orthogonal PSD pair (<q, v> = 0). Nonnegative
/// values across samples are the infinitesimal evidence of order
/// preservation.
double monotonicity_witness(const VectorField& field, double t, const SpdMat& P,
                            const SymMat& v, const SymMat& q);

/// GRDE field with piecewise-constant coefficients over a time grid.
/// A single bundle gives the constant-coefficient case.
class GrdeField final : public VectorField {
 public:
  explicit GrdeField(GrdeParams p);
  /// schedule: (start time, bundle), sorted by start time; bundle i applies
  /// on [t_i, t_{i+1}).
  explicit GrdeField(std::vector<std::pair<double, GrdeParams>> schedule);

  const GrdeParams& paramsAt(double t) const;

  int dim() const override;
  SymMat phi(double t, const SymMat& P) const override;
  SymMat dphi(double t, const SymMat& P, const SymMat& Z) const override;
  bool feasibleDomain(double t, const SymMat& P) const override;

 private:
  std::vector<std::pair<double, GrdeParams>> schedule_;
};

class StdRiccatiField final : public VectorField {
 public:
  explicit StdRiccatiField(StdRiccatiParams p) : p_(std::move(p)) {}

  const StdRiccatiParams& params() const { return p_; }

  int dim() const override { return p_.n(); }
  SymMat phi(double t, const SymMat& P) const override;
  SymMat dphi(double t, const SymMat& P, const SymMat& Z) const override;
  bool feasibleDomain(double, const SymMat&) const override { return true; }

 private:
  StdRiccatiParams p_;
};

}  // namespace conetract
