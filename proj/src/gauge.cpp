#include "conetract/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conetract/cone.hpp"

namespace conetract {

GaugeFunction GaugeFunction::pnorm(double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("GaugeFunction: p must lie in [1, inf]");
  }
  return GaugeFunction{Kind::PNorm, p};
}

bool GaugeFunction::isSup() const {
  return kind == Kind::SupNorm || std::isinf(p);
}

std::string GaugeFunction::name() const {
  if (isSup()) return "sup";
  std::ostringstream os;
  os << "p" << p;
  return os.str();
}

double gauge_eval(const GaugeFunction& nu, const Vector& lambda) {
  if (lambda.size() < 1) throw DimensionError("gauge_eval: empty vector");
  if (nu.isSup()) return lambda.cwiseAbs().maxCoeff();
  if (nu.p == 1.0) return lambda.cwiseAbs().sum();
  if (nu.p == 2.0) return lambda.norm();
  double acc = 0.0;
  for (int i = 0; i < lambda.size(); ++i) acc += std::pow(std::abs(lambda(i)), nu.p);
  return std::pow(acc, 1.0 / nu.p);
}

Subgradient gauge_subgradient(const GaugeFunction& nu, const Vector& lambda) {
  if (lambda.size() < 1) throw DimensionError("gauge_subgradient: empty vector");
  if (lambda.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("gauge_subgradient: zero vector");
  }
  Vector mu = Vector::Zero(lambda.size());
  if (nu.isSup()) {
    // Lowest index among the maximal |lambda_i| coordinates.
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < lambda.size(); ++i) {
      if (std::abs(lambda(i)) > best) {
        best = std::abs(lambda(i));
        arg = i;
      }
    }
    mu(arg) = lambda(arg) >= 0.0 ? 1.0 : -1.0;
    return {mu};
  }
  if (nu.p == 1.0) {
    for (int i = 0; i < lambda.size(); ++i) {
      if (lambda(i) > 0.0) mu(i) = 1.0;
      else if (lambda(i) < 0.0) mu(i) = -1.0;
    }
    return {mu};
  }
  const double norm = gauge_eval(nu, lambda);
  for (int i = 0; i < lambda.size(); ++i) {
    const double sign = lambda(i) > 0.0 ? 1.0 : (lambda(i) < 0.0 ? -1.0 : 0.0);
    mu(i) = sign * std::pow(std::abs(lambda(i)) / norm, nu.p - 1.0);
  }
  return {mu};
}

double spectral_gauge(const GaugeFunction& nu, const SymMat& P) {
  return gauge_eval(nu, sym_eigenvalues(P));
}

double finsler_distance(const GaugeFunction& nu, const SpdMat& P, const SpdMat& Q) {
  detail::require_same_dim(P.dim(), Q.dim(), "finsler_distance");
  const Matrix w = spd_inv_sqrt(P);
  const SpdMat inner{SymMat(Matrix(w * Q.mat() * w))};
  return spectral_gauge(nu, spd_log(inner));
}

double necessary_condition_value(const std::function<SymMat(const SymMat&)>& fieldLin,
                                 const SymMat& phiAtI, const Vector& lambda,
                                 const Subgradient& mu) {
  const int n = phiAtI.dim();
  if (lambda.size() != n || mu.mu.size() != n) {
    throw DimensionError("necessary_condition_value: vector dims must match the field");
  }
  const SymMat dPhi = fieldLin(SymMat::Diagonal(lambda));
  // <diag(mu), X> under the trace pairing touches only the diagonal of
  // X = DPhi(I).diag(lambda) - diag(lambda) Phi(I); no symmetrization.
  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    value += mu.mu(i) * (dPhi(i, i) - lambda(i) * phiAtI(i, i));
  }
  return value;
}

GrdeParams build_counterexample(int n, double epsilon, const Vector& e) {
  if (n < 2) throw std::invalid_argument("build_counterexample: n >= 2 required");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("build_counterexample: epsilon must lie in (0, 1)");
  }
  if (e.size() != n - 1) {
    throw DimensionError("build_counterexample: e must have n - 1 entries");
  }
  const double s = std::sqrt(1.0 - epsilon);

  Matrix A = Matrix::Identity(n, n);
  Matrix B = Matrix::Zero(n, n);
  B.topLeftCorner(n - 1, n - 1) = (epsilon - s) * Matrix::Identity(n - 1, n - 1);
  B.bottomLeftCorner(1, n - 1) = -s * e.transpose();
  B(n - 1, n - 1) = epsilon;
  Matrix C = Matrix::Zero(n, n);
  C.topLeftCorner(n - 1, n - 1) = (1.0 + s) * Matrix::Identity(n - 1, n - 1);
  C.topRightCorner(n - 1, 1) = e;
  C(n - 1, n - 1) = s;
  Matrix D = s * Matrix::Identity(n, n);
  Matrix L = Matrix::Zero(n, n);
  SymMat Q = SymMat(Matrix(epsilon * Matrix::Identity(n, n)));
  SymMat R = SymMat(Matrix(epsilon * Matrix::Identity(n, n)));
  return GrdeParams(std::move(A), std::move(B), std::move(C), std::move(D), std::move(L),
                    std::move(Q), std::move(R));
}

AuditGrid AuditGrid::defaults(int n) {
  AuditGrid g;
  g.epsilons = {0.01, 0.05, 0.1, 0.2, 0.5};
  g.lambdaLast = {-1.0, -0.5, -0.1, 0.1, 0.5, 1.0};
  g.e = Vector::Ones(n - 1);
  return g;
}

ViolationReport audit_nonexpansiveness(const GaugeFunction& nu, int n, const AuditGrid& grid) {
  if (n < 2) throw std::invalid_argument("audit_nonexpansiveness: n >= 2 required");
  ViolationReport report;
  report.gauge = nu.name();
  report.maxValue = -std::numeric_limits<double>::infinity();

  const SymMat eye = SymMat::Identity(n);
  for (double eps : grid.epsilons) {
    const GrdeParams params = build_counterexample(n, eps, grid.e);
    const SymMat phiAtI = grde_phi(params, eye);
    auto lin = [&params](const SymMat& Z) { return grde_dphi(params, SymMat::Identity(Z.dim()), Z); };
    for (double lastLambda : grid.lambdaLast) {
      Vector lambda = Vector::Ones(n);
      lambda(n - 1) = lastLambda;
      const Subgradient mu = gauge_subgradient(nu, lambda);
      const double value = necessary_condition_value(lin, phiAtI, lambda, mu);
      AuditWitness w{eps, grid.e, lambda, mu.mu, value};
      if (value > report.maxValue) {
        report.maxValue = value;
        report.maxWitness = w;
      }
      if (value > 0.0) report.witnesses.push_back(std::move(w));
    }
  }
  std::sort(report.witnesses.begin(), report.witnesses.end(),
            [](const AuditWitness& a, const AuditWitness& b) { return a.value > b.value; });
  return report;
}

}  // namespace conetract
