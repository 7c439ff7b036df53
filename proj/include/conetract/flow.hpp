#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "conetract/matrix_types.hpp"
#include "conetract/riccati.hpp"

namespace conetract {

enum class ExitReason { horizonReached, leftFeasibleDomain, stepFailure };

const char* to_string(ExitReason r);

/// Time-stamped flow states. Every recorded state is a valid SpdMat; exitTime
/// is set when integration stopped before the requested horizon and is the
/// last accepted feasible time (a lower bound on the true exit time) unless
/// bisection refinement was requested.
struct Trajectory {
  std::vector<double> times;
  std::vector<SpdMat> states;
  std::optional<double> exitTime;
  ExitReason exitReason = ExitReason::horizonReached;

  double finalTime() const { return times.back(); }
  const SpdMat& finalState() const { return states.back(); }
};

struct IntegrationConfig {
  double relTol = 1e-8;
  double absTol = 1e-10;
  double maxStep = 0.0;      // 0 = horizon length
  double minStep = 0.0;      // 0 = machine-level floor
  double recordEvery = 0.0;  // 0 = record every accepted step
  bool bisectExit = false;   // refine the exit time to 1e-9
  long maxSteps = 2'000'000;
};

class DomainExitError : public std::runtime_error {
 public:
  DomainExitError(double exitTime, ExitReason reason);
  double exitTime;
  ExitReason reason;
};

/// Integrate P' = phi(t, P) from (s, P0) to time t with an embedded
/// Dormand-Prince 4/5 pair and PI step control. States are symmetrized every
/// accepted step; the run halts when an accepted state leaves the feasible
/// domain or fails the Cholesky positivity check.
Trajectory integrate(const VectorField& field, const SpdMat& P0, double s, double t,
                     const IntegrationConfig& cfg = {});

/// Final state of integrate(); throws DomainExitError if the flow exits the
/// domain before t.
SpdMat flow_map(const VectorField& field, double s, double t, const SpdMat& P0,
                const IntegrationConfig& cfg = {});

using MetricFn = std::function<double(const SpdMat&, const SpdMat&)>;

/// Distances of the paired trajectories started at (P1, P2) evaluated at the
/// grid times, truncated at the earlier domain exit. timeGrid must be
/// increasing and start at the initial time.
std::vector<std::pair<double, double>> observed_contraction(
    const VectorField& field, const SpdMat& P1, const SpdMat& P2,
    const std::vector<double>& timeGrid, const MetricFn& metric,
    const IntegrationConfig& cfg = {});

/// Thompson-metric overload.
std::vector<std::pair<double, double>> observed_contraction(
    const VectorField& field, const SpdMat& P1, const SpdMat& P2,
    const std::vector<double>& timeGrid, const IntegrationConfig& cfg = {});

/// min over the grid of lambda_min(M^t(P1) - M^t(P2)) for P1 >= P2; values
/// >= -1e-8 are empirical evidence of order preservation.
double order_preservation_probe(const VectorField& field, const SpdMat& P1, const SpdMat& P2,
                                const std::vector<double>& timeGrid,
                                const IntegrationConfig& cfg = {});

}  // namespace conetract
