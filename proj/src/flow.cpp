#include "conetract/flow.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

#include "conetract/cone.hpp"

namespace conetract {

namespace {

// Dormand-Prince 5(4) tableau, FSAL form.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - bhat, the embedded 4th-order error weights.
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

bool spd_check(const Matrix& y) {
  Eigen::LLT<Matrix> llt(y);
  return llt.info() == Eigen::Success;
}

struct StepTrial {
  bool feasibilityFailure = false;
  Matrix y5;
  Matrix k7;
  double err = 0.0;
};

class Stepper {
 public:
  Stepper(const VectorField& field, const IntegrationConfig& cfg) : field_(field), cfg_(cfg) {}

  Matrix eval(double t, const Matrix& y) const {
    return field_.phi(t, SymMat(y)).mat();
  }

  StepTrial trial(double t, const Matrix& y, const Matrix& k1, double h) const {
    StepTrial out;
    try {
      const Matrix k2 = eval(t + c2 * h, y + h * (a21 * k1));
      const Matrix k3 = eval(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Matrix k4 = eval(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Matrix k5 = eval(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Matrix k6 =
          eval(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Matrix y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      y5 = 0.5 * (y5 + y5.transpose());
      const Matrix k7 = eval(t + h, y5);
      const Matrix e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double acc = 0.0;
      for (int i = 0; i < y.rows(); ++i) {
        for (int j = 0; j < y.cols(); ++j) {
          const double sc =
              cfg_.absTol + cfg_.relTol * std::max(std::abs(y(i, j)), std::abs(y5(i, j)));
          const double q = e(i, j) / sc;
          acc += q * q;
        }
      }
      out.err = std::sqrt(acc / static_cast<double>(y.size()));
      out.y5 = std::move(y5);
      out.k7 = k7;
    } catch (const FeasibilityError&) {
      out.feasibilityFailure = true;
    }
    return out;
  }

 private:
  const VectorField& field_;
  const IntegrationConfig& cfg_;
};

}  // namespace

const char* to_string(ExitReason r) {
  switch (r) {
    case ExitReason::horizonReached: return "horizonReached";
    case ExitReason::leftFeasibleDomain: return "leftFeasibleDomain";
    case ExitReason::stepFailure: return "stepFailure";
  }
  return "unknown";
}

DomainExitError::DomainExitError(double exitTime_, ExitReason reason_)
    : std::runtime_error(std::string("flow left the domain at t = ") + std::to_string(exitTime_) +
                         " (" + to_string(reason_) + ")"),
      exitTime(exitTime_), reason(reason_) {}

Trajectory integrate(const VectorField& field, const SpdMat& P0, double s, double t,
                     const IntegrationConfig& cfg) {
  if (t < s) throw std::invalid_argument("integrate: t must be >= s");
  if (cfg.relTol <= 0.0 || cfg.absTol <= 0.0) {
    throw std::invalid_argument("integrate: tolerances must be positive");
  }
  if (cfg.minStep > 0.0 && cfg.maxStep > 0.0 && cfg.minStep > cfg.maxStep) {
    throw std::invalid_argument("integrate: minStep must not exceed maxStep");
  }
  detail::require_same_dim(field.dim(), P0.dim(), "integrate");
  if (!field.feasibleDomain(s, P0)) {
    throw FeasibilityError("integrate: initial state is not in the feasible domain");
  }

  Trajectory traj;
  traj.times.push_back(s);
  traj.states.push_back(P0);
  if (t == s) return traj;

  const double span = t - s;
  const double hmax = cfg.maxStep > 0.0 ? std::min(cfg.maxStep, span) : span;
  const double hfloor = std::max(
      cfg.minStep, 16.0 * std::numeric_limits<double>::epsilon() * std::max({std::abs(s), std::abs(t), 1.0}));

  Stepper stepper(field, cfg);
  Matrix y = P0.mat();
  double tc = s;
  Matrix k1 = stepper.eval(tc, y);

  // First step from the size of the field relative to the state.
  double h = 0.01 * (y.norm() + cfg.absTol) / (k1.norm() + 1e-30);
  h = std::min(std::max(h, hfloor), hmax);

  constexpr double betaPI = 0.04;       // PI controller damping
  constexpr double alphaPI = 0.2 - betaPI * 0.75;
  constexpr double safety = 0.9;
  double facold = 1e-4;
  double lastRecorded = s;
  bool feasibilityRejected = false;

  auto record = [&](double time, const Matrix& state, bool force) {
    if (!force && cfg.recordEvery > 0.0 && time - lastRecorded < cfg.recordEvery) return;
    if (time == traj.times.back()) return;
    traj.times.push_back(time);
    traj.states.push_back(SpdMat(SymMat(state)));
    lastRecorded = time;
  };

  auto stop = [&](double exitTime, ExitReason reason) {
    traj.exitTime = exitTime;
    traj.exitReason = reason;
  };

  for (long step = 0; step < cfg.maxSteps; ++step) {
    bool last = false;
    if (tc + h >= t) {
      h = t - tc;
      last = true;
    }

    StepTrial trial = stepper.trial(tc, y, k1, h);
    if (trial.feasibilityFailure) {
      feasibilityRejected = true;
      h *= 0.25;
      if (h < hfloor) {
        stop(tc, ExitReason::leftFeasibleDomain);
        return traj;
      }
      continue;
    }

    if (trial.err <= 1.0) {
      const double tNew = tc + h;
      const SymMat stateNew(trial.y5);
      if (!field.feasibleDomain(tNew, stateNew) || !spd_check(trial.y5)) {
        if (cfg.bisectExit) {
          // Bisect the step length from the last accepted point.
          double lo = 0.0, hi = h;
          Matrix best = y;
          while (hi - lo > 1e-9) {
            const double mid = 0.5 * (lo + hi);
            StepTrial probe = stepper.trial(tc, y, k1, mid);
            const bool ok = !probe.feasibilityFailure &&
                            field.feasibleDomain(tc + mid, SymMat(probe.y5)) &&
                            spd_check(probe.y5);
            if (ok) {
              lo = mid;
              best = probe.y5;
            } else {
              hi = mid;
            }
          }
          if (lo > 0.0) record(tc + lo, best, true);
          stop(tc + lo, ExitReason::leftFeasibleDomain);
        } else {
          stop(tc, ExitReason::leftFeasibleDomain);
        }
        return traj;
      }

      y = stateNew.mat();
      tc = tNew;
      k1 = trial.k7;  // FSAL
      record(tc, y, last);
      if (last) return traj;

      const double fac11 = std::pow(std::max(trial.err, 1e-16), alphaPI);
      double fac = fac11 / std::pow(facold, betaPI);
      fac = std::max(0.1, std::min(5.0, fac / safety));
      facold = std::max(trial.err, 1e-4);
      h = std::min(h / fac, hmax);
      feasibilityRejected = false;
    } else {
      const double fac11 = std::pow(trial.err, alphaPI);
      h = h / std::min(5.0, fac11 / safety);
    }

    if (h < hfloor) {
      stop(tc, feasibilityRejected ? ExitReason::leftFeasibleDomain : ExitReason::stepFailure);
      return traj;
    }
  }

  stop(tc, ExitReason::stepFailure);
  return traj;
}

SpdMat flow_map(const VectorField& field, double s, double t, const SpdMat& P0,
                const IntegrationConfig& cfg) {
  Trajectory traj = integrate(field, P0, s, t, cfg);
  if (traj.exitReason != ExitReason::horizonReached) {
    throw DomainExitError(traj.exitTime.value_or(s), traj.exitReason);
  }
  return traj.finalState();
}

std::vector<std::pair<double, double>> observed_contraction(
    const VectorField& field, const SpdMat& P1, const SpdMat& P2,
    const std::vector<double>& timeGrid, const MetricFn& metric, const IntegrationConfig& cfg) {
  if (timeGrid.empty()) throw std::invalid_argument("observed_contraction: empty time grid");
  std::vector<std::pair<double, double>> out;
  SpdMat a = P1;
  SpdMat b = P2;
  out.emplace_back(timeGrid.front(), metric(a, b));
  for (std::size_t i = 1; i < timeGrid.size(); ++i) {
    if (timeGrid[i] <= timeGrid[i - 1]) {
      throw std::invalid_argument("observed_contraction: grid must be increasing");
    }
    try {
      a = flow_map(field, timeGrid[i - 1], timeGrid[i], a, cfg);
      b = flow_map(field, timeGrid[i - 1], timeGrid[i], b, cfg);
    } catch (const DomainExitError&) {
      break;  // truncate at the earlier exit
    }
    out.emplace_back(timeGrid[i], metric(a, b));
  }
  return out;
}

std::vector<std::pair<double, double>> observed_contraction(
    const VectorField& field, const SpdMat& P1, const SpdMat& P2,
    const std::vector<double>& timeGrid, const IntegrationConfig& cfg) {
  return observed_contraction(
      field, P1, P2, timeGrid,
      [](const SpdMat& x, const SpdMat& y) { return thompson_distance(x, y); }, cfg);
}

double order_preservation_probe(const VectorField& field, const SpdMat& P1, const SpdMat& P2,
                                const std::vector<double>& timeGrid,
                                const IntegrationConfig& cfg) {
  if (timeGrid.empty()) throw std::invalid_argument("order_preservation_probe: empty time grid");
  if (!loewner_leq(P2.sym(), P1.sym())) {
    throw std::invalid_argument("order_preservation_probe: P1 >= P2 required");
  }
  SpdMat a = P1;
  SpdMat b = P2;
  double minEig = sym_eigenvalues(a.sym() - b.sym()).minCoeff();
  for (std::size_t i = 1; i < timeGrid.size(); ++i) {
    try {
      a = flow_map(field, timeGrid[i - 1], timeGrid[i], a, cfg);
      b = flow_map(field, timeGrid[i - 1], timeGrid[i], b, cfg);
    } catch (const DomainExitError&) {
      break;
    }
    minEig = std::min(minEig, sym_eigenvalues(a.sym() - b.sym()).minCoeff());
  }
  return minEig;
}

}  // namespace conetract
