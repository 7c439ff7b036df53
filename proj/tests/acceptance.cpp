// Acceptance suite: one check per shipped claim, each printed as a single
// pass/fail line. Runs everything even after a failure; the exit code is the
// number of failed criteria. Finishes in well under two minutes on a laptop.
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "conetract/cone.hpp"
#include "conetract/discrete.hpp"
#include "conetract/flow.hpp"
#include "conetract/gare.hpp"
#include "conetract/gauge.hpp"
#include "conetract/rates.hpp"
#include "conetract/riccati.hpp"
#include "conetract/sampling.hpp"
#include "oracles.hpp"

using namespace conetract;

namespace {

int failures = 0;

struct Criterion {
  std::string name;
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }

  void finish() const {
    if (ok) {
      std::printf("[PASS] %s\n", name.c_str());
    } else {
      std::printf("[FAIL] %s: %s\n", name.c_str(), detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
};

Matrix scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

GrdeParams scalar_grde(double a, double b, double c, double d, double l, double q, double r) {
  return GrdeParams(scalar(a), scalar(b), scalar(c), scalar(d), scalar(l), SymMat(scalar(q)),
                    SymMat(scalar(r)));
}

void criterion1_thompson_metric() {
  Criterion c{"C1 Thompson metric: axioms, invariances, functional consistency (500 draws)"};
  std::mt19937_64 rng(1001);
  for (int i = 0; i < 500 && c.ok; ++i) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const SpdMat a = random_spd(n, rng, 0.1, 10.0);
    const SpdMat b = random_spd(n, rng, 0.1, 10.0);
    const SpdMat mid = random_spd(n, rng, 0.1, 10.0);

    const double dab = thompson_distance(a, b);
    c.expect(dab == thompson_distance(b, a), "symmetry not exact");
    c.expect(dab >= 0.0, "negative distance");
    c.expect(dab <= thompson_distance(a, mid) + thompson_distance(mid, b) + 1e-9,
             "triangle inequality beyond 1e-9");
    c.expect(std::abs(std::exp(dab) - std::max(M_over(a.sym(), b), M_over(b.sym(), a))) <= 1e-10,
             "exp(dT) vs max(M, M-swapped) beyond 1e-10");

    Matrix g = random_gaussian(n, n, rng) + 0.5 * Matrix::Identity(n, n);
    const SpdMat ga{Matrix(g * a.mat() * g.transpose())};
    const SpdMat gb{Matrix(g * b.mat() * g.transpose())};
    c.expect(std::abs(thompson_distance(ga, gb) - dab) <= 1e-9,
             "congruence invariance beyond 1e-9");
    c.expect(std::abs(thompson_distance(spd_inv(a), spd_inv(b)) - dab) <= 1e-9,
             "inversion invariance beyond 1e-9");
  }
  c.finish();
}

void criterion2_derivative_oracles() {
  Criterion c{"C2 derivative oracles: grde_dphi/dF vs central differences, defect identity"};
  std::mt19937_64 rng(1002);
  for (int i = 0; i < 200 && c.ok; ++i) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int k = 1 + static_cast<int>(rng() % 3);
    const GrdeParams p = oracles::random_well_posed_grde(n, k, rng);
    const SpdMat P = random_spd(n, rng, 0.3, 3.0);
    const SymMat Z = oracles::random_sym(n, rng);

    auto phi = [&](const Matrix& X) { return grde_phi(p, SymMat(X)).mat(); };
    const Matrix fd = oracles::central_difference(phi, P.mat(), Z.mat(), 1e-6);
    const Matrix exact = grde_dphi(p, P, Z).mat();
    c.expect((fd - exact).norm() <= 1e-5 * std::max(1.0, exact.norm()),
             "grde_dphi vs finite differences beyond 1e-5 relative");

    const SymMat defect = grde_defect(p, P);
    const SymMat viaDef = grde_dphi(p, P, P) - grde_phi(p, P);
    c.expect((defect.mat() - viaDef.mat()).norm() <= 1e-10,
             "defect identity beyond 1e-10");

    const DiscreteParams dp(random_gaussian(n, n, rng), random_gaussian(n, k, rng),
                            random_gaussian(n, n, rng), random_gaussian(n, k, rng),
                            random_spd(n, rng), random_spd(k, rng));
    auto F = [&](const Matrix& X) { return apply_F(dp, SpdMat(SymMat(X))).mat(); };
    const SymMat Zd = oracles::random_sym(n, rng, 0.2);
    const Matrix fdF = oracles::central_difference(F, P.mat(), Zd.mat(), 1e-6);
    const Matrix exactF = dF(dp, P, Zd).mat();
    c.expect((fdF - exactF).norm() <= 1e-5 * std::max(1.0, exactF.norm()),
             "dF vs finite differences beyond 1e-5 relative");
  }
  c.finish();
}

void criterion3_grde_nonexpansive() {
  Criterion c{"C3 GRDE non-expansiveness and order preservation (100 well-posed instances)"};
  std::mt19937_64 rng(1003);
  const auto grid = oracles::linspace(0.0, 2.0, 9);
  for (int i = 0; i < 100 && c.ok; ++i) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int k = 1 + static_cast<int>(rng() % 3);
    const GrdeParams p = oracles::random_well_posed_grde(n, k, rng);
    const GrdeField field(p);
    const SpdMat P1 = random_spd(n, rng, 0.4, 2.5);
    const SpdMat P2 = random_spd(n, rng, 0.4, 2.5);

    const auto series = observed_contraction(field, P1, P2, grid);
    for (std::size_t j = 1; j < series.size() && c.ok; ++j) {
      c.expect(series[j].second <= series[j - 1].second + 1e-6,
               "Thompson distance increased beyond 1e-6 slack");
    }

    const Matrix bump = random_gaussian(n, n, rng);
    const SpdMat hiStart{Matrix(P2.mat() + bump * bump.transpose())};
    c.expect(order_preservation_probe(field, hiStart, P2, grid) >= -1e-8,
             "order preservation probe below -1e-8");
  }
  c.finish();
}

void criterion4_std_rate() {
  Criterion c{"C4 standard Riccati rate: closed form 2, observed decay, beta formula"};
  const RateCertificate closed = std_global_rate(SymMat::Identity(3), SymMat::Identity(3));
  c.expect(closed.rate == 2.0, "closed form is not exactly 2");

  const StdRiccatiField field(
      StdRiccatiParams(Matrix::Zero(3, 3), SymMat::Identity(3), SymMat::Identity(3)));
  std::mt19937_64 rng(1004);
  const auto grid = oracles::linspace(0.0, 1.5, 7);
  for (int i = 0; i < 50 && c.ok; ++i) {
    const SpdMat P1 = random_spd(3, rng, 0.3, 3.0);
    const SpdMat P2 = random_spd(3, rng, 0.3, 3.0);
    const auto series = observed_contraction(field, P1, P2, grid);
    const double d0 = series.front().second;
    for (const auto& [t, d] : series) {
      c.expect(d <= std::exp(-2.0 * t) * d0 * (1.0 + 1e-4) + 1e-14,
               "decay slower than e^{-2t} beyond tolerance");
    }
  }

  std::vector<SpdMat> pts;
  pts.push_back(SpdMat::Identity(3));
  for (int i = 0; i < 40; ++i) pts.push_back(random_spd(3, rng, 0.2, 5.0));
  const RateCertificate beta =
      std_beta_rate(SymMat::Identity(3), SymMat::Identity(3), DomainSampler::userList(pts));
  c.expect(std::abs(beta.rate - 2.0) <= 1e-6, "beta formula misses 2 beyond 1e-6");
  c.finish();
}

void criterion5_grde_local() {
  Criterion c{"C5 GRDE local contraction at P0 = 2I: certificate and measured decay"};
  std::mt19937_64 rng(1005);
  const SpdMat P0{Matrix(2.0 * Matrix::Identity(3, 3))};
  const auto grid = oracles::linspace(0.0, 2.0, 11);
  for (int i = 0; i < 8 && c.ok; ++i) {
    const GrdeParams p = oracles::random_invariant_strict_grde(3, 2, P0, rng);
    const RateCertificate cert = grde_local_rate(p, P0);
    c.expect(cert.rate == m_over(p.schurQ(), P0), "certificate is not m(Q - L'R^{-1}L / 2I)");
    c.expect(cert.rate > 0.0, "certificate rate not positive");

    const GrdeField field(p);
    const SpdMat P1 = random_spd(3, rng, 0.1, 1.8);
    const SpdMat P2 = random_spd(3, rng, 0.1, 1.8);
    if (!loewner_leq(P1.sym(), P0.sym(), 1e-12) || !loewner_leq(P2.sym(), P0.sym(), 1e-12)) {
      continue;
    }
    const auto series = observed_contraction(field, P1, P2, grid);
    const double slope = oracles::decay_exponent(series);
    c.expect(slope >= cert.rate * 0.95, "measured decay exponent below 95% of the certificate");
  }
  c.finish();
}

void criterion6_gare() {
  Criterion c{"C6 GARE: scalar oracles, matrix residuals, convergence rate, uniqueness"};
  // quadratic oracle
  {
    const GrdeParams p = scalar_grde(-1, 1, 0, 0, 0, 1, 1);
    const GareSolution sol = solve_gare(p, SpdMat(scalar(1.0)), 1e-12);
    c.expect(std::abs(sol.Pbar(0, 0) - (std::sqrt(2.0) - 1.0)) <= 1e-9,
             "scalar root misses the quadratic formula beyond 1e-9");
  }
  // bisection oracle with multiplicative noise
  {
    const GrdeParams p = scalar_grde(-1, 1, 0.5, 0.8, 0, 1, 1);
    double lo = 1e-6, hi = 100.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      (grde_phi(p, SymMat(scalar(mid)))(0, 0) > 0.0 ? lo : hi) = mid;
    }
    const GareSolution sol = solve_gare(p, SpdMat(scalar(2.0 * hi)), 1e-12);
    c.expect(std::abs(sol.Pbar(0, 0) - 0.5 * (lo + hi)) <= 1e-9,
             "scalar root misses the bisection oracle beyond 1e-9");
  }
  // matrix instances
  std::mt19937_64 rng(1006);
  const SpdMat P0{Matrix(2.0 * Matrix::Identity(3, 3))};
  const auto grid = oracles::linspace(0.0, 3.0, 13);
  for (int i = 0; i < 5 && c.ok; ++i) {
    const GrdeParams p = oracles::random_invariant_strict_grde(3, 2, P0, rng);
    const GareSolution sol = solve_gare(p, P0, 1e-10);
    c.expect(sol.residualNorm < 1e-8, "matrix residual not below 1e-8");

    const GareSolution again = solve_gare(p, random_spd(3, rng, 0.2, 1.2), 1e-10);
    c.expect(thompson_distance(sol.Pbar, again.Pbar) <= 1e-7,
             "two-start disagreement beyond 1e-7");

    const SpdMat start = random_spd(3, rng, 0.2, 1.5);
    if (!loewner_leq(start.sym(), P0.sym(), 1e-12)) continue;
    const double bound = gare_convergence_bound(p, sol.Pbar, start);
    const GrdeField field(p);
    std::vector<std::pair<double, double>> series;
    SpdMat cur = start;
    series.emplace_back(0.0, thompson_distance(cur, sol.Pbar));
    for (std::size_t j = 1; j < grid.size(); ++j) {
      cur = flow_map(field, grid[j - 1], grid[j], cur);
      series.emplace_back(grid[j], thompson_distance(cur, sol.Pbar));
    }
    c.expect(oracles::decay_exponent(series) >= bound * 0.95,
             "empirical convergence rate below 95% of gare_convergence_bound");
  }
  c.finish();
}

void criterion7_discrete() {
  Criterion c{"C7 discrete operator: Lipschitz bound, directed ratios, lgty gap, Woodbury"};
  std::mt19937_64 rng(1007);

  // strict instances: 10^4 sampled pairs never beat the closed-form bound
  for (int i = 0; i < 3 && c.ok; ++i) {
    const Matrix B = random_gaussian(3, 3, rng) + 2.0 * Matrix::Identity(3, 3);
    const Matrix D = random_gaussian(3, 3, rng) * 0.5;
    const Matrix S = random_gaussian(3, 3, rng) * 0.6;
    const DiscreteParams p(B * S, B, D * S, D, random_spd(3, rng, 0.5, 2.0),
                           random_spd(3, rng, 0.5, 2.0));
    const LipschitzReport report = lipschitz_report(p);
    c.expect(report.strict, "constructed instance not detected as strict");
    const double sampled = empirical_lipschitz(p, 10000, 4000 + i);
    c.expect(sampled <= report.bound + 1e-6, "sampled ratio exceeds the bound + 1e-6");
  }

  // non-strict: directed sampling pushes the ratio above 0.99
  {
    const Matrix A = random_orthonormal(3, rng) * 0.9;
    const DiscreteParams p(A, Matrix::Zero(3, 1), Matrix(0.3 * random_orthonormal(3, rng)),
                           Matrix::Zero(3, 1), random_spd(3, rng, 0.5, 2.0),
                           SpdMat::Identity(1));
    c.expect(!lipschitz_report(p).strict, "no-control instance wrongly strict");
    c.expect(directed_lipschitz_probe(p, 40, 11) > 0.99,
             "directed ratios stay below 0.99 on a non-strict instance");
  }

  // lgty gap over 1000 draws
  {
    std::uniform_real_distribution<double> deltaDist(2.0, 8.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const int n = 1 + static_cast<int>(rng() % 4);
      const SpdMat R = random_spd(n, rng, 0.2, 5.0);
      const Matrix g = random_gaussian(n, n, rng);
      worst = std::min(worst, lgty_gap(R, SymMat(Matrix(g * g.transpose())), deltaDist(rng)));
    }
    c.expect(worst >= -1e-9, "lgty gap dips below -1e-9");
  }

  // Woodbury reduction identity
  for (int i = 0; i < 10 && c.ok; ++i) {
    const int n = 3, m = 4;
    const Matrix stack = random_gaussian(2 * n, 2, rng) * random_gaussian(2, m, rng);
    const DiscreteParams p(random_gaussian(n, n, rng), stack.topRows(n),
                           random_gaussian(n, n, rng), stack.bottomRows(n),
                           random_spd(n, rng), random_spd(m, rng, 0.5, 2.0));
    const RankFactorization rf = rank_factorization(stack, 1e-10);
    const DiscreteParams reduced(p.A, rf.left.topRows(n), p.C, rf.left.bottomRows(n), p.Q,
                                 woodbury_rbar(rf.W, p.R));
    const SpdMat P = random_spd(n, rng, 0.2, 4.0);
    c.expect((apply_F(p, P).mat() - apply_F(reduced, P).mat()).norm() <= 1e-9,
             "Woodbury-reduced operator deviates beyond 1e-9");
  }
  c.finish();
}

void criterion8_finsler_audit() {
  Criterion c{"C8 Finsler audit: p gauges falsified with closed-form match, sup clean, dynamics"};
  const AuditGrid grid = AuditGrid::defaults(2);

  auto closedForm = [](double eps, const Vector& e, const Vector& lambda, const Vector& mu) {
    const int n = static_cast<int>(lambda.size());
    double tail = -lambda(n - 1) * e.squaredNorm();
    for (int i = 0; i < n - 1; ++i) tail += lambda(i) * e(i) * e(i);
    return -2.0 * eps * mu.dot(lambda) + mu(n - 1) * tail;
  };

  ViolationReport p2;
  for (const GaugeFunction& nu : {GaugeFunction::pnorm(2), GaugeFunction::pnorm(1)}) {
    const ViolationReport report = audit_nonexpansiveness(nu, 2, grid);
    c.expect(!report.witnesses.empty(),
             "no positive witness for gauge " + nu.name());
    for (const auto& w : report.witnesses) {
      c.expect(std::abs(w.value - closedForm(w.epsilon, w.e, w.lambda, w.mu)) <= 1e-9,
               "numerical linearization deviates from the closed form beyond 1e-9");
    }
    if (nu.name() == "p2") p2 = report;
  }
  const ViolationReport sup = audit_nonexpansiveness(GaugeFunction::sup(), 2, grid);
  c.expect(sup.maxValue <= 1e-9, "sup gauge shows a positive necessary-condition value");

  // dynamic confirmation at the maximizing witness: d_2 expands, d_T does not
  if (c.ok) {
    const AuditWitness& w = p2.maxWitness;
    const GrdeParams params = build_counterexample(2, w.epsilon, w.e);
    const GrdeField field(params);
    const double h = 1e-3, horizon = 0.25;
    const SpdMat A0 = SpdMat::Identity(2);
    const SpdMat B0{Matrix(Matrix::Identity(2, 2) + h * Matrix(w.lambda.asDiagonal()))};

    const GaugeFunction two = GaugeFunction::pnorm(2);
    const double d2Start = finsler_distance(two, A0, B0);
    const double dTStart = thompson_distance(A0, B0);
    const SpdMat A1 = flow_map(field, 0.0, horizon, A0);
    const SpdMat B1 = flow_map(field, 0.0, horizon, B0);
    const double d2End = finsler_distance(two, A1, B1);
    const double dTEnd = thompson_distance(A1, B1);
    c.expect(d2End / d2Start > 1.0, "d_2 did not expand along the witness direction");
    c.expect(dTEnd <= dTStart * (1.0 + 1e-6), "d_T expanded on a well-posed instance");
  }
  c.finish();
}

void criterion9_orthant() {
  Criterion c{"C9 orthant corollary: scalar Riccati infimum 2, decoupled linear exactly 0"};
  OrthantField riccati;
  riccati.phi = [](double, const Vector& x) {
    Vector out(1);
    out(0) = 1.0 - x(0) * x(0);
    return out;
  };
  riccati.jacobian = [](double, const Vector& x) {
    Matrix j(1, 1);
    j(0, 0) = -2.0 * x(0);
    return j;
  };
  std::vector<Vector> gridPts;
  for (double x = 0.25; x <= 4.0 + 1e-12; x += 0.25) {
    Vector v(1);
    v(0) = x;
    gridPts.push_back(v);
  }
  c.expect(std::abs(orthant_rate(riccati, gridPts, {0.0}).rate - 2.0) <= 1e-8,
           "scalar 1 - x^2 infimum misses 2 beyond 1e-8");

  OrthantField lin;
  lin.phi = [](double, const Vector& x) { return Vector(-x); };
  lin.jacobian = [](double, const Vector& x) {
    return Matrix(-Matrix::Identity(x.size(), x.size()));
  };
  std::vector<Vector> pts;
  std::mt19937_64 rng(1009);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  for (int i = 0; i < 25; ++i) {
    Vector v(3);
    for (int j = 0; j < 3; ++j) v(j) = unif(rng);
    pts.push_back(v);
  }
  c.expect(orthant_rate(lin, pts, {0.0}).rate == 0.0, "decoupled linear rate not exactly 0");
  c.finish();
}

void criterion10_indefinite_sigma() {
  Criterion c{"C10 indefinite-Sigma corollary: interval arithmetic, invariance, certified rate"};
  const IndefiniteSigmaAnalysis a = indefinite_sigma_analysis(2.0, 1.0, 1.0, 1.0);
  c.expect(a.hypothesesHold, "hypotheses rejected for (2, 1, 1, 1)");
  c.expect(std::abs(a.lambdaLo - (2.0 - std::sqrt(3.0))) <= 1e-12, "lambda interval lower end");
  c.expect(std::abs(a.lambdaHi - 1.0) <= 1e-12, "lambda interval upper end");

  // conforming instance: A = -2I, Dmat = I, Sigma indefinite with Sigma >= -I
  const double lambda = 0.5;
  const double alpha = a.rateAt(lambda);  // (1 - 0.25)/0.5 = 1.5
  Matrix sigma(2, 2);
  sigma.setZero();
  sigma.diagonal() << -0.8, 0.3;
  const StdRiccatiParams params(Matrix(-2.0 * Matrix::Identity(2, 2)), SymMat(sigma),
                                SymMat::Identity(2));
  const StdRiccatiField field(params);
  const SpdMat box{Matrix(lambda * Matrix::Identity(2, 2))};

  std::mt19937_64 rng(1010);
  const SpdMat start = random_spd(2, rng, 0.05, 0.45);
  const Trajectory traj = integrate(field, start, 0.0, 4.0);
  c.expect(traj.exitReason == ExitReason::horizonReached, "flow left the domain unexpectedly");
  for (const auto& s : traj.states) {
    c.expect(loewner_leq(s.sym(), box.sym(), 1e-8), "(0, lambda I] invariance violated");
  }

  const GareSolution sol = solve_std_are(params, start, 1e-11);
  c.expect(sol.residualNorm < 1e-9, "ARE residual too large");
  c.expect(loewner_leq(sol.Pbar.sym(), box.sym(), 1e-8), "fixed point escapes (0, lambda I]");

  const SpdMat probe = random_spd(2, rng, 0.05, 0.45);
  std::vector<std::pair<double, double>> series;
  SpdMat cur = probe;
  const auto grid = oracles::linspace(0.0, 2.0, 11);
  series.emplace_back(0.0, thompson_distance(cur, sol.Pbar));
  for (std::size_t j = 1; j < grid.size(); ++j) {
    cur = flow_map(field, grid[j - 1], grid[j], cur);
    series.emplace_back(grid[j], thompson_distance(cur, sol.Pbar));
  }
  c.expect(oracles::decay_exponent(series) >= alpha * 0.95,
           "measured decay below 95% of the certified rate");
  c.finish();
}

}  // namespace

int main() {
  criterion1_thompson_metric();
  criterion2_derivative_oracles();
  criterion3_grde_nonexpansive();
  criterion4_std_rate();
  criterion5_grde_local();
  criterion6_gare();
  criterion7_discrete();
  criterion8_finsler_audit();
  criterion9_orthant();
  criterion10_indefinite_sigma();

  if (failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", failures);
  }
  return failures;
}
