#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "conetract/cone.hpp"
#include "conetract/gare.hpp"
#include "conetract/json_io.hpp"
#include "conetract/sampling.hpp"
#include "oracles.hpp"

using namespace conetract;

namespace {

Matrix scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

GrdeParams scalar_grde(double a, double b, double c, double d, double l, double q, double r) {
  return GrdeParams(scalar(a), scalar(b), scalar(c), scalar(d), scalar(l), SymMat(scalar(q)),
                    SymMat(scalar(r)));
}

GrdeParams lyapunov(const Matrix& A, const SymMat& Q) {
  const int n = static_cast<int>(A.rows());
  return GrdeParams(A, Matrix::Zero(n, 1), Matrix::Zero(n, n), Matrix::Zero(n, 1),
                    Matrix::Zero(1, n), Q, SymMat::Identity(1));
}

double scalar_phi(const GrdeParams& p, double x) {
  return grde_phi(p, SymMat(scalar(x)))(0, 0);
}

double bisect_root(const GrdeParams& p, double lo, double hi) {
  REQUIRE(scalar_phi(p, lo) > 0.0);
  REQUIRE(scalar_phi(p, hi) < 0.0);
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (scalar_phi(p, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("scalar GARE root matches the quadratic formula") {
  // phi(p) = -2p + 1 - p^2, root sqrt(2) - 1
  const GrdeParams p = scalar_grde(-1, 1, 0, 0, 0, 1, 1);
  const GareSolution sol = solve_gare(p, SpdMat(scalar(1.0)), 1e-12);
  CHECK(std::abs(sol.Pbar(0, 0) - (std::sqrt(2.0) - 1.0)) < 1e-9);
  CHECK_FALSE(sol.heuristic);  // phi(1) = -2 <= 0 certifies the start
  REQUIRE(sol.certificate.has_value());
  CHECK(sol.certificate->rate > 0.0);
}

TEST_CASE("scalar GARE with multiplicative noise matches the bisection oracle") {
  const GrdeParams p = scalar_grde(-1, 1, 0.5, 0.8, 0, 1, 1);
  const double root = bisect_root(p, 1e-6, 100.0);
  const GareSolution sol = solve_gare(p, SpdMat(scalar(2.0 * root)), 1e-10);
  CHECK(std::abs(sol.Pbar(0, 0) - root) < 1e-8);
}

TEST_CASE("start at the solution returns immediately") {
  const GrdeParams p = lyapunov(Matrix(-Matrix::Identity(2, 2)),
                                SymMat(Matrix(2.0 * Matrix::Identity(2, 2))));
  const GareSolution sol = solve_gare(p, SpdMat::Identity(2), 1e-10);
  CHECK(sol.residualNorm < 1e-10);
  CHECK(sol.integrationTime == 0.0);
  CHECK((sol.Pbar.mat() - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("verify_gare") {
  const GrdeParams p = lyapunov(Matrix(-Matrix::Identity(2, 2)),
                                SymMat(Matrix(2.0 * Matrix::Identity(2, 2))));
  const VerifyResult ok = verify_gare(p, SymMat::Identity(2));
  CHECK(ok.feasible);
  CHECK(ok.residualNorm < 1e-12);

  // infeasible P reports a negative margin without throwing
  const GrdeParams bad(Matrix::Identity(2, 2), Matrix::Zero(2, 1), Matrix::Zero(2, 2),
                       Matrix::Zero(2, 1), Matrix::Zero(1, 2), SymMat::Identity(2),
                       SymMat(Matrix(-Matrix::Identity(1, 1))));
  const VerifyResult r = verify_gare(bad, SymMat::Identity(2));
  CHECK_FALSE(r.feasible);
  CHECK(r.feasibilityMargin < 0.0);
}

TEST_CASE("gare_convergence_bound arithmetic") {
  // phi(P) = -P + I with Pbar = I, Q = I, L = 0
  const GrdeParams p = lyapunov(Matrix(-0.5 * Matrix::Identity(2, 2)), SymMat::Identity(2));
  const SpdMat Pbar = SpdMat::Identity(2);
  REQUIRE(verify_gare(p, Pbar).residualNorm < 1e-12);

  // d = log 2: bound = (1 - 1/2)/log 2
  const SpdMat P2{Matrix(2.0 * Matrix::Identity(2, 2))};
  CHECK(gare_convergence_bound(p, Pbar, P2) == doctest::Approx(0.5 / std::log(2.0)).epsilon(1e-12));

  // d -> 0 recovers m(Q - L'R^{-1}L / Pbar)
  const SpdMat Pnear{Matrix((1.0 + 1e-9) * Matrix::Identity(2, 2))};
  CHECK(gare_convergence_bound(p, Pbar, Pnear) == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(gare_convergence_bound(p, P2, Pbar), std::invalid_argument);
}

TEST_CASE("matrix GARE: certified solve, invariance, rate, uniqueness") {
  std::mt19937_64 rng(211);
  const SpdMat P0{Matrix(2.0 * Matrix::Identity(3, 3))};
  for (int i = 0; i < 5; ++i) {
    const GrdeParams p = oracles::random_invariant_strict_grde(3, 2, P0, rng);
    const GareSolution sol = solve_gare(p, P0, 1e-10);
    CHECK(sol.residualNorm < 1e-8);
    CHECK(sol.feasibilityMargin > 0.0);
    REQUIRE(sol.certificate.has_value());
    CHECK(sol.certificate->rate > 0.0);

    // every recorded flow state stayed inside (0, P0]
    for (const auto& [t, state] : sol.path) {
      CHECK(loewner_leq(state.sym(), P0.sym(), 1e-8));
    }

    // two-start uniqueness: heuristic run from a different admissible start
    const SpdMat other = random_spd(3, rng, 0.2, 1.2);
    const GareSolution sol2 = solve_gare(p, other, 1e-10);
    CHECK(thompson_distance(sol.Pbar, sol2.Pbar) < 1e-7);

    // measured contraction towards Pbar is at least the certified bound
    const SpdMat start = random_spd(3, rng, 0.3, 1.5);
    if (!loewner_leq(start.sym(), P0.sym(), 1e-12)) continue;
    const double bound = gare_convergence_bound(p, sol.Pbar, start);
    const GrdeField field(p);
    std::vector<std::pair<double, double>> series;
    SpdMat cur = start;
    const auto grid = oracles::linspace(0.0, 3.0, 13);
    series.emplace_back(0.0, thompson_distance(cur, sol.Pbar));
    for (std::size_t j = 1; j < grid.size(); ++j) {
      cur = flow_map(field, grid[j - 1], grid[j], cur);
      series.emplace_back(grid[j], thompson_distance(cur, sol.Pbar));
    }
    const double d0 = series.front().second;
    for (const auto& [t, d] : series) {
      CHECK(d <= std::exp(-bound * t) * d0 * (1.0 + 1e-3) + 1e-12);
    }
    const double slope = oracles::decay_exponent(series);
    CHECK(slope >= sol.certificate->rate * 0.95);
  }
}

TEST_CASE("solve_gare_auto finds an admissible scale for a Lyapunov instance") {
  const GrdeParams p = lyapunov(Matrix(-Matrix::Identity(2, 2)),
                                SymMat(Matrix(2.0 * Matrix::Identity(2, 2))));
  const GareSolution sol = solve_gare_auto(p, 1e-10);
  CHECK_FALSE(sol.heuristic);
  CHECK((sol.Pbar.mat() - Matrix::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("solve_std_are") {
  // scalar: 1 - p^2 = 0 at p = 1
  const StdRiccatiParams sp(scalar(0.0), SymMat(scalar(1.0)), SymMat(scalar(1.0)));
  const GareSolution sol = solve_std_are(sp, SpdMat(scalar(3.0)), 1e-11);
  CHECK(std::abs(sol.Pbar(0, 0) - 1.0) < 1e-9);
  REQUIRE(sol.certificate.has_value());
  CHECK(sol.certificate->rate == doctest::Approx(2.0));

  // SPD coefficients: uniqueness probe across two starts
  std::mt19937_64 rng(223);
  const SpdMat SigmaSpd = random_spd(3, rng, 0.5, 2.0);
  const SpdMat DmatSpd = random_spd(3, rng, 0.5, 2.0);
  const StdRiccatiParams mp(random_gaussian(3, 3, rng), SigmaSpd.sym(), DmatSpd.sym());
  const GareSolution a = solve_std_are(mp, SpdMat::Identity(3), 1e-10);
  const GareSolution b = solve_std_are(mp, random_spd(3, rng, 0.2, 4.0), 1e-10);
  CHECK(a.residualNorm < 1e-9);
  CHECK(thompson_distance(a.Pbar, b.Pbar) < 1e-7);
}

TEST_CASE("indefinite Sigma inside the box corollary hypotheses") {
  // A = -2I, Dmat = I, Sigma indefinite with Sigma >= -I
  Matrix sigma(2, 2);
  sigma.setZero();
  sigma.diagonal() << -0.8, 0.3;
  const StdRiccatiParams p(Matrix(-2.0 * Matrix::Identity(2, 2)), SymMat(sigma),
                           SymMat::Identity(2));
  const double lambda = 0.5;  // inside [2 - sqrt(3), 1)
  const SpdMat box{Matrix(lambda * Matrix::Identity(2, 2))};

  // invariance of (0, lambda I] along the flow
  const StdRiccatiField field(p);
  std::mt19937_64 rng(227);
  const SpdMat start = random_spd(2, rng, 0.05, 0.45);
  REQUIRE(loewner_leq(start.sym(), box.sym(), 1e-12));
  const Trajectory traj = integrate(field, start, 0.0, 4.0);
  REQUIRE(traj.exitReason == ExitReason::horizonReached);
  for (const auto& s : traj.states) CHECK(loewner_leq(s.sym(), box.sym(), 1e-8));

  // the ARE solution sits inside the box and two starts agree on it
  const GareSolution sol = solve_std_are(p, start, 1e-10);
  CHECK(sol.residualNorm < 1e-9);
  CHECK(loewner_leq(sol.Pbar.sym(), box.sym(), 1e-8));
  const GareSolution sol2 = solve_std_are(p, random_spd(2, rng, 0.05, 0.45), 1e-10);
  CHECK(thompson_distance(sol.Pbar, sol2.Pbar) < 1e-7);
}

TEST_CASE("gare solution JSON") {
  const GrdeParams p = scalar_grde(-1, 1, 0, 0, 0, 1, 1);
  const GareSolution sol = solve_gare(p, SpdMat(scalar(1.0)), 1e-10);
  const json j = gare_solution_to_json(sol);
  CHECK(j.contains("Pbar"));
  CHECK(j.contains("residualNorm"));
  CHECK(j.contains("feasibilityMargin"));
  CHECK(j.contains("certificate"));
  CHECK(j.at("heuristic") == false);
}
