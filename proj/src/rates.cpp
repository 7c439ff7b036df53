#include "conetract/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conetract/cone.hpp"
#include "conetract/sampling.hpp"

namespace conetract {

namespace {

const char* kSampledNote =
    "upper estimate of the best rate from a finite sample; sampling "
    "under-approximates the supremum, so this is not a guarantee";
const char* kClosedNote = "closed-form lower bound on the achievable contraction rate";

}  // namespace

const char* to_string(RateMethod m) {
  switch (m) {
    case RateMethod::generalSupFormula: return "generalSupFormula";
    case RateMethod::stdGlobalClosedForm: return "stdGlobalClosedForm";
    case RateMethod::grdeLocalClosedForm: return "grdeLocalClosedForm";
    case RateMethod::indefiniteSigmaBox: return "indefiniteSigmaBox";
    case RateMethod::degenerateSigma: return "degenerateSigma";
    case RateMethod::orthantInfimum: return "orthantInfimum";
    case RateMethod::fixedPointFormula: return "fixedPointFormula";
  }
  return "unknown";
}

const char* to_string(RateRigor r) {
  return r == RateRigor::closedForm ? "closedForm" : "sampledEstimate";
}

DomainSampler DomainSampler::orderIntervalUniform(std::optional<SpdMat> lo, SpdMat hi, int count,
                                                  std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("DomainSampler: count must be >= 1");
  if (lo.has_value()) detail::require_same_dim(lo->dim(), hi.dim(), "DomainSampler");
  DomainSampler s;
  s.strategy_ = Strategy::orderInterval;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  s.count_ = count;
  s.seed_ = seed;
  std::ostringstream os;
  os << "order interval " << (s.lo_.has_value() ? "[lo, hi]" : "(0, hi]") << ", dim "
     << s.hi_->dim() << ", " << count << " samples";
  s.description_ = os.str();
  return s;
}

DomainSampler DomainSampler::rayScaling(std::vector<SpdMat> base, std::vector<double> scales) {
  if (base.empty() || scales.empty()) {
    throw std::invalid_argument("DomainSampler: ray scaling needs base points and scales");
  }
  for (double c : scales) {
    if (!(c > 0.0 && c <= 1.0)) {
      throw std::invalid_argument("DomainSampler: ray scales must lie in (0, 1]");
    }
  }
  DomainSampler s;
  s.strategy_ = Strategy::rayScaling;
  s.base_ = std::move(base);
  s.scales_ = std::move(scales);
  s.description_ = "ray scaling of " + std::to_string(s.base_.size()) + " base points";
  return s;
}

DomainSampler DomainSampler::userList(std::vector<SpdMat> points, std::string description) {
  if (points.empty()) throw std::invalid_argument("DomainSampler: empty user list");
  DomainSampler s;
  s.strategy_ = Strategy::userList;
  s.base_ = std::move(points);
  s.description_ = std::move(description);
  return s;
}

std::vector<SpdMat> DomainSampler::sample() const {
  std::vector<SpdMat> out;
  switch (strategy_) {
    case Strategy::orderInterval: {
      std::mt19937_64 rng(seed_);
      std::uniform_real_distribution<double> unif(1e-3, 1.0);
      const int n = hi_->dim();
      const Matrix span = lo_.has_value() ? Matrix(hi_->mat() - lo_->mat()) : hi_->mat();
      const Matrix root = spd_sqrt(SpdMat(SymMat(span))).mat();
      out.reserve(count_);
      for (int i = 0; i < count_; ++i) {
        const Matrix u = random_orthonormal(n, rng);
        Vector w(n);
        for (int j = 0; j < n; ++j) w(j) = unif(rng);
        Matrix contraction = u * w.asDiagonal() * u.transpose();
        Matrix p = root * contraction * root;
        if (lo_.has_value()) p += lo_->mat();
        out.emplace_back(SymMat(std::move(p)));
      }
      break;
    }
    case Strategy::rayScaling:
      out.reserve(base_.size() * scales_.size());
      for (const SpdMat& b : base_) {
        for (double c : scales_) out.emplace_back(SymMat(Matrix(c * b.mat())));
      }
      break;
    case Strategy::userList:
      out = base_;
      break;
  }
  return out;
}

RateCertificate general_rate_estimate(const VectorField& field, const DomainSampler& sampler,
                                      const std::vector<double>& times) {
  const std::vector<SpdMat> samples = sampler.sample();
  if (samples.empty()) throw std::invalid_argument("general_rate_estimate: empty sampler");
  if (times.empty()) throw std::invalid_argument("general_rate_estimate: empty time list");

  double worst = -std::numeric_limits<double>::infinity();
  RateWitness witness;
  for (double s : times) {
    for (const SpdMat& x : samples) {
      if (!field.feasibleDomain(s, x)) {
        throw FeasibilityError("general_rate_estimate: sample outside the feasible domain");
      }
      const SymMat defect = field.dphi(s, x, x) - field.phi(s, x);
      const double value = M_over(defect, x);
      if (value > worst) {
        worst = value;
        witness = RateWitness{x.mat(), s, value, "sample"};
      }
    }
  }
  RateCertificate cert;
  cert.rate = -worst;
  cert.domain = sampler.domainDescription() + " (scaling closure lambda*U in U assumed, not verified)";
  cert.method = RateMethod::generalSupFormula;
  cert.rigor = RateRigor::sampledEstimate;
  cert.soundness = kSampledNote;
  cert.witnesses.push_back(std::move(witness));
  cert.seed = sampler.seed();
  return cert;
}

RateCertificate std_global_rate(const SymMat& Sigma, const SymMat& Dmat) {
  detail::require_same_dim(Sigma.dim(), Dmat.dim(), "std_global_rate");
  const double tolS = kPsdRelTol * std::max(1.0, sym_eigenvalues(Sigma).cwiseAbs().maxCoeff());
  const double tolD = kPsdRelTol * std::max(1.0, sym_eigenvalues(Dmat).cwiseAbs().maxCoeff());
  if (!loewner_leq(SymMat::Zero(Sigma.dim()), Sigma, tolS) ||
      !loewner_leq(SymMat::Zero(Dmat.dim()), Dmat, tolD)) {
    throw HypothesisError(
        "std_global_rate: Sigma and Dmat must be positive semi-definite; no finite global rate "
        "exists otherwise");
  }
  // Sigma may be singular: shift the tiny negative eigenvalues introduced by
  // round-off back to zero before the square root.
  Eigen::SelfAdjointEigenSolver<Matrix> es(Sigma.mat());
  Vector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sigmaRoot = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  const SymMat inner{Matrix(sigmaRoot * Dmat.mat() * sigmaRoot)};
  const double m = std::max(0.0, sym_eigenvalues(inner).minCoeff());
  RateCertificate cert;
  cert.rate = 2.0 * std::sqrt(m);
  cert.domain = "interior of the PSD cone (global)";
  cert.method = RateMethod::stdGlobalClosedForm;
  cert.rigor = RateRigor::closedForm;
  cert.soundness = kClosedNote;
  cert.witnesses.push_back(RateWitness{inner.mat(), 0.0, m, "Sigma^{1/2} Dmat Sigma^{1/2}"});
  return cert;
}

RateCertificate std_beta_rate(const SymMat& Sigma, const SymMat& Dmat,
                              const DomainSampler& sampler) {
  detail::require_same_dim(Sigma.dim(), Dmat.dim(), "std_beta_rate");
  const std::vector<SpdMat> samples = sampler.sample();
  if (samples.empty()) throw std::invalid_argument("std_beta_rate: empty sampler");
  double best = std::numeric_limits<double>::infinity();
  RateWitness witness;
  for (const SpdMat& P : samples) {
    const SymMat lhs{Matrix(P.mat() * Sigma.mat() * P.mat() + Dmat.mat())};
    const double beta = m_over(lhs, P);
    if (beta < best) {
      best = beta;
      witness = RateWitness{P.mat(), 0.0, beta, "sample"};
    }
  }
  RateCertificate cert;
  cert.rate = best;
  cert.domain = sampler.domainDescription();
  cert.method = RateMethod::generalSupFormula;
  cert.rigor = RateRigor::sampledEstimate;
  cert.soundness = kSampledNote;
  cert.witnesses.push_back(std::move(witness));
  cert.seed = sampler.seed();
  return cert;
}

RateCertificate grde_local_rate(const GrdeParams& p, const SpdMat& P0) {
  detail::require_same_dim(p.n(), P0.dim(), "grde_local_rate");
  if (!p.strictBlock()) {
    throw HypothesisError("grde_local_rate: [[Q, L'], [L, R]] must be strictly positive definite");
  }
  const double alpha = m_over(p.schurQ(), P0);
  RateCertificate cert;
  cert.rate = alpha;
  cert.domain = "any U in (0, P0] closed under scaling by (0, 1]";
  cert.method = RateMethod::grdeLocalClosedForm;
  cert.rigor = RateRigor::closedForm;
  cert.soundness = kClosedNote;
  cert.witnesses.push_back(RateWitness{P0.mat(), 0.0, alpha, "P0"});
  return cert;
}

bool IndefiniteSigmaAnalysis::contains(double lambda) const {
  return hypothesesHold && lambda >= lambdaLo && lambda < lambdaHi;
}

double IndefiniteSigmaAnalysis::rateAt(double lambda) const {
  if (!contains(lambda)) {
    throw HypothesisError("IndefiniteSigmaAnalysis: lambda outside the admissible interval");
  }
  return (mD - cSigma * lambda * lambda) / lambda;
}

IndefiniteSigmaAnalysis indefinite_sigma_analysis(double cA, double cD, double mD,
                                                  double cSigma) {
  if (!(cA > 0.0 && cD > 0.0 && mD > 0.0 && cSigma > 0.0)) {
    throw std::invalid_argument("indefinite_sigma_analysis: all scalar bounds must be positive");
  }
  IndefiniteSigmaAnalysis a;
  a.cA = cA;
  a.cD = cD;
  a.mD = mD;
  a.cSigma = cSigma;
  const double disc = cA * cA - cD * cSigma;
  if (disc < 0.0) {
    a.diagnostic = "hypothesis cA^2 >= cD*cSigma violated";
    return a;
  }
  const double edge = cA - std::sqrt(disc);
  if (!(cSigma * mD > edge * edge)) {
    a.diagnostic = "hypothesis cSigma*mD > (cA - sqrt(cA^2 - cD*cSigma))^2 violated";
    return a;
  }
  a.hypothesesHold = true;
  a.lambdaLo = edge / cSigma;
  a.lambdaHi = std::sqrt(mD / cSigma);
  return a;
}

RateCertificate indefinite_sigma_rate(const IndefiniteSigmaAnalysis& a, double lambda) {
  const double rate = a.rateAt(lambda);
  RateCertificate cert;
  cert.rate = rate;
  cert.domain = "(0, lambda I] with lambda = " + std::to_string(lambda);
  cert.method = RateMethod::indefiniteSigmaBox;
  cert.rigor = RateRigor::closedForm;
  cert.soundness = kClosedNote;
  Matrix point(1, 1);
  point(0, 0) = lambda;
  cert.witnesses.push_back(RateWitness{point, 0.0, rate, "lambda"});
  return cert;
}

double degenerate_sigma_rate(double cA, double cD, double mD, const SpdMat& P) {
  if (!(cA > 0.0 && mD > 0.0)) {
    throw std::invalid_argument("degenerate_sigma_rate: cA and mD must be positive");
  }
  const double mIP = m_over(SymMat::Identity(P.dim()), P);
  return std::min(mIP, cA / cD) * mD;
}

Matrix OrthantField::jacobianAt(double t, const Vector& x) const {
  if (jacobian) return jacobian(t, x);
  const int n = static_cast<int>(x.size());
  Matrix j(n, n);
  for (int col = 0; col < n; ++col) {
    Vector xp = x, xm = x;
    const double h = fdStep * std::max(1.0, std::abs(x(col)));
    xp(col) += h;
    xm(col) -= h;
    j.col(col) = (phi(t, xp) - phi(t, xm)) / (2.0 * h);
  }
  return j;
}

RateCertificate orthant_rate(const OrthantField& field, const std::vector<Vector>& samples,
                             const std::vector<double>& times) {
  if (samples.empty()) throw std::invalid_argument("orthant_rate: empty sampler");
  if (times.empty()) throw std::invalid_argument("orthant_rate: empty time list");
  double best = std::numeric_limits<double>::infinity();
  RateWitness witness;
  for (double s : times) {
    for (const Vector& x : samples) {
      if (x.minCoeff() <= 0.0) {
        throw std::invalid_argument("orthant_rate: samples must be strictly positive");
      }
      const Vector f = field.phi(s, x);
      const Matrix j = field.jacobianAt(s, x);
      const Vector radial = j * x - f;
      for (int i = 0; i < x.size(); ++i) {
        const double g = -radial(i) / x(i);
        if (g < best) {
          best = g;
          witness = RateWitness{x.transpose(), s, g, "component " + std::to_string(i)};
        }
      }
    }
  }
  RateCertificate cert;
  cert.rate = best;
  cert.domain = "sampled subset of the open positive orthant";
  cert.method = RateMethod::orthantInfimum;
  cert.rigor = RateRigor::sampledEstimate;
  cert.soundness = kSampledNote;
  cert.witnesses.push_back(std::move(witness));
  return cert;
}

RateCertificate fixed_point_rate(const VectorField& field, const SpdMat& xbar, double mu,
                                 const std::vector<double>& lambdaGrid) {
  if (!(mu > 1.0)) throw std::invalid_argument("fixed_point_rate: mu must exceed 1");
  const double resid = field.phi(0.0, xbar).mat().norm();
  if (resid > 1e-8) {
    throw std::invalid_argument("fixed_point_rate: xbar is not a zero of the field (|phi| = " +
                                std::to_string(resid) + ")");
  }
  double best = std::numeric_limits<double>::infinity();
  RateWitness witness;
  auto consider = [&](double lambda, double value) {
    if (value < best) {
      best = value;
      Matrix point(1, 1);
      point(0, 0) = lambda;
      witness = RateWitness{point, 0.0, value, "lambda"};
    }
  };
  for (double lambda : lambdaGrid) {
    if (!(lambda > 1.0 / mu && lambda < mu)) {
      throw std::invalid_argument("fixed_point_rate: lambda outside (1/mu, mu)");
    }
    if (lambda == 1.0) {
      throw std::invalid_argument("fixed_point_rate: the grid must exclude lambda = 1");
    }
    const SymMat scaled{Matrix(lambda * xbar.mat())};
    const double w = -1.0 / (lambda * std::log(lambda));
    consider(lambda, m_over(SymMat(Matrix(w * field.phi(0.0, scaled).mat())), xbar));
  }
  // The lambda -> 1 limit is analytic: -(lambda ln lambda)^{-1} phi(lambda x)
  // tends to -Dphi(x) x.
  consider(1.0, m_over(SymMat(Matrix(-field.dphi(0.0, xbar, xbar).mat())), xbar));

  RateCertificate cert;
  cert.rate = best;
  cert.domain = "order interval (xbar/mu, mu xbar), mu = " + std::to_string(mu);
  cert.method = RateMethod::fixedPointFormula;
  cert.rigor = RateRigor::sampledEstimate;
  cert.soundness = kSampledNote;
  cert.witnesses.push_back(std::move(witness));
  return cert;
}

}  // namespace conetract
