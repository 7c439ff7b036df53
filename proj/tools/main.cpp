// conetract: Thompson-metric contraction analysis of Riccati flows on the
// positive definite cone. Batch commands over JSON problem files; JSON
// reports on stdout or --out, CSV for trajectories.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "conetract/json_io.hpp"
#include "conetract/sampling.hpp"
#include "conetract/version.hpp"

using namespace conetract;

namespace {

// Exit code contract: 0 success, 2 input/schema error, 3 hypothesis failure,
// 4 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitNumerical = 4;

struct GlobalOpts {
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-10;
  std::string out;
  std::string format = "json";
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_atomically(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write file: " + tmp);
    out << payload;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::invalid_argument("cannot move output into place: " + path);
  }
}

void emit_report(const GlobalOpts& g, const std::string& command, std::uint64_t digest,
                 json outputs, double wallMs) {
  json report{{"command", command},
              {"inputsDigest", hex64(digest)},
              {"seed", g.seed},
              {"version", kVersion},
              {"outputs", std::move(outputs)}};
  if (g.timing) report["wallTimeMs"] = wallMs;
  const std::string payload = report.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << payload;
  } else {
    write_atomically(g.out, payload);
  }
}

struct ProblemFile {
  std::string kind;
  json params;
  json options;  // object, possibly empty
};

ProblemFile load_problem(const std::string& path, const std::set<std::string>& allowedOptions) {
  const json j = parse_json_file(path);
  if (!j.is_object()) throw std::invalid_argument(path + ": problem object expected");
  for (const auto& [key, _] : j.items()) {
    if (key != "kind" && key != "params" && key != "options") {
      throw std::invalid_argument(path + ": unknown field '" + key + "'");
    }
  }
  if (!j.contains("kind") || !j.contains("params")) {
    throw std::invalid_argument(path + ": 'kind' and 'params' are required");
  }
  ProblemFile p;
  p.kind = j.at("kind").get<std::string>();
  p.params = j.at("params");
  p.options = j.value("options", json::object());
  if (!p.options.is_object()) throw std::invalid_argument(path + ": 'options' must be an object");
  for (const auto& [key, _] : p.options.items()) {
    if (allowedOptions.count(key) == 0) {
      throw std::invalid_argument(path + ": unknown option '" + key + "'");
    }
  }
  static const std::set<std::string> kinds = {"grde", "stdRiccati", "discrete", "orthant",
                                              "counterexample"};
  if (kinds.count(p.kind) == 0) {
    throw std::invalid_argument(path + ": unknown kind '" + p.kind + "'");
  }
  return p;
}

GrdeParams grde_of(const ProblemFile& p) {
  if (p.kind == "grde") return grde_params_from_json(p.params);
  if (p.kind == "counterexample") {
    for (const auto& [key, _] : p.params.items()) {
      if (key != "n" && key != "epsilon" && key != "e") {
        throw std::invalid_argument("counterexample params: unknown field '" + key + "'");
      }
    }
    const int n = p.params.at("n").get<int>();
    const double eps = p.params.at("epsilon").get<double>();
    const auto ev = p.params.at("e").get<std::vector<double>>();
    Vector e(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) e(i) = ev[i];
    return build_counterexample(n, eps, e);
  }
  throw std::invalid_argument("a grde or counterexample problem is required");
}

GaugeFunction parse_gauge(const std::string& s) {
  if (s == "sup" || s == "thompson") return GaugeFunction::sup();
  try {
    return GaugeFunction::pnorm(std::stod(s));
  } catch (const std::exception&) {
    throw std::invalid_argument("--gauge expects 'sup' or a p value >= 1");
  }
}

DomainSampler sampler_from_spec(const json& j, std::uint64_t seed) {
  for (const auto& [key, _] : j.items()) {
    if (key != "lo" && key != "hi" && key != "count") {
      throw std::invalid_argument("domain: unknown field '" + key + "'");
    }
  }
  std::optional<SpdMat> lo;
  if (j.contains("lo") && !j.at("lo").is_null()) lo = spd_from_json(j.at("lo"));
  const SpdMat hi = spd_from_json(j.at("hi"));
  const int count = j.value("count", 200);
  return DomainSampler::orderIntervalUniform(std::move(lo), hi, count, seed);
}

DomainSampler default_sampler(int n, std::uint64_t seed) {
  return DomainSampler::orderIntervalUniform(
      std::nullopt, SpdMat(SymMat(Matrix(2.0 * Matrix::Identity(n, n)))), 200, seed);
}

int run_metric(const GlobalOpts& g, const std::string& fileA, const std::string& fileB,
               const std::string& gauge) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpdMat a = spd_from_json(parse_json_file(fileA));
  const SpdMat b = spd_from_json(parse_json_file(fileB));
  json outputs{{"dT", thompson_distance(a, b)}};
  if (!gauge.empty()) {
    outputs["gauge"] = parse_gauge(gauge).name();
    outputs["dNu"] = finsler_distance(parse_gauge(gauge), a, b);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  std::uint64_t digest = fnv1a(read_file(fileA));
  digest = fnv1a(read_file(fileB), digest);
  digest = fnv1a(gauge, digest);
  emit_report(g, "metric", digest, std::move(outputs), ms);
  return kExitOk;
}

int run_integrate(const GlobalOpts& g, const std::string& problemPath, const std::string& fromPath,
                  double t0v, double t1v, const std::string& outPath) {
  const auto tick = std::chrono::steady_clock::now();
  const ProblemFile p = load_problem(problemPath, {"P0"});
  const SpdMat P0 = spd_from_json(parse_json_file(fromPath));

  std::unique_ptr<VectorField> field;
  if (p.kind == "stdRiccati") {
    field = std::make_unique<StdRiccatiField>(std_params_from_json(p.params));
  } else {
    field = std::make_unique<GrdeField>(grde_of(p));
  }

  IntegrationConfig cfg;
  const Trajectory traj = integrate(*field, P0, t0v, t1v, cfg);
  if (traj.exitReason == ExitReason::stepFailure) {
    throw std::runtime_error("integration failed (step-size underflow) at t = " +
                             std::to_string(traj.exitTime.value_or(t0v)));
  }

  if (!outPath.empty()) {
    std::ostringstream body;
    if (g.format == "csv") {
      trajectory_to_csv(traj, body);
    } else {
      body << trajectory_to_json(traj).dump(2) << "\n";
    }
    write_atomically(outPath, body.str());
  }

  json outputs{{"exitReason", to_string(traj.exitReason)},
               {"finalTime", traj.finalTime()},
               {"recordedStates", traj.states.size()},
               {"trajectoryFile", outPath}};
  outputs["exitTime"] = traj.exitTime.has_value() ? json(*traj.exitTime) : json(nullptr);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();
  std::uint64_t digest = fnv1a(read_file(problemPath));
  digest = fnv1a(read_file(fromPath), digest);
  digest = fnv1a(std::to_string(t0v) + "," + std::to_string(t1v), digest);
  GlobalOpts gStdout = g;
  gStdout.out.clear();  // the summary goes to stdout; --traj-out holds the trajectory
  emit_report(gStdout, "integrate", digest, std::move(outputs), ms);
  return kExitOk;
}

int run_rate(const GlobalOpts& g, const std::string& problemPath, const std::string& method,
             const std::string& domainPath, const std::string& p0Path) {
  const auto tick = std::chrono::steady_clock::now();
  const ProblemFile p =
      load_problem(problemPath, {"P0", "cA", "cD", "mD", "cSigma", "lambda", "points"});

  std::optional<SpdMat> P0;
  if (!p0Path.empty()) {
    P0 = spd_from_json(parse_json_file(p0Path));
  } else if (p.options.contains("P0")) {
    P0 = spd_from_json(p.options.at("P0"));
  }

  std::unique_ptr<VectorField> field;
  std::optional<GrdeParams> grde;
  std::optional<StdRiccatiParams> stdp;
  if (p.kind == "stdRiccati") {
    stdp = std_params_from_json(p.params);
    field = std::make_unique<StdRiccatiField>(*stdp);
  } else {
    grde = grde_of(p);
    field = std::make_unique<GrdeField>(*grde);
  }
  const int n = field->dim();

  std::optional<RateCertificate> cert;
  std::vector<std::string> failed;
  if (method == "closed" || method == "auto") {
    if (stdp.has_value() && p.options.contains("cA") &&
        p.options.value("cSigma", 1.0) == 0.0) {
      // cSigma = 0 is the degenerate corollary; it needs a box point P0.
      if (P0.has_value()) {
        const double rate = degenerate_sigma_rate(p.options.at("cA").get<double>(),
                                                  p.options.at("cD").get<double>(),
                                                  p.options.at("mD").get<double>(), *P0);
        RateCertificate degc;
        degc.rate = rate;
        degc.domain = "(0, lambda I] box containing P0";
        degc.method = RateMethod::degenerateSigma;
        degc.rigor = RateRigor::closedForm;
        degc.soundness = "closed-form lower bound on the achievable contraction rate";
        degc.witnesses.push_back(RateWitness{P0->mat(), 0.0, rate, "P0"});
        cert = std::move(degc);
      } else {
        failed.push_back("degenerateSigma: no P0 supplied (use --P0 or options.P0)");
      }
    } else if (stdp.has_value() && p.options.contains("cA")) {
      const IndefiniteSigmaAnalysis a = indefinite_sigma_analysis(
          p.options.at("cA").get<double>(), p.options.at("cD").get<double>(),
          p.options.at("mD").get<double>(), p.options.at("cSigma").get<double>());
      if (a.hypothesesHold) {
        cert = indefinite_sigma_rate(a, p.options.at("lambda").get<double>());
      } else {
        failed.push_back("indefiniteSigmaBox: " + a.diagnostic);
      }
    } else if (stdp.has_value()) {
      try {
        cert = std_global_rate(stdp->Sigma, stdp->Dmat);
      } catch (const HypothesisError& e) {
        failed.push_back(std::string("stdGlobalClosedForm: ") + e.what());
      }
    } else if (grde.has_value() && P0.has_value()) {
      try {
        cert = grde_local_rate(*grde, *P0);
      } catch (const HypothesisError& e) {
        failed.push_back(std::string("grdeLocalClosedForm: ") + e.what());
      }
    } else if (grde.has_value()) {
      failed.push_back("grdeLocalClosedForm: no P0 supplied (use --P0 or options.P0)");
    }
  }
  if (!cert.has_value()) {
    if (method == "closed") {
      std::string what = "no applicable closed form;";
      for (const auto& f : failed) what += " " + f + ";";
      throw HypothesisError(what);
    }
    const DomainSampler sampler = domainPath.empty()
                                      ? default_sampler(n, g.seed)
                                      : sampler_from_spec(parse_json_file(domainPath), g.seed);
    cert = general_rate_estimate(*field, sampler, {0.0});
  }

  json outputs = rate_certificate_to_json(*cert);
  if (!failed.empty()) outputs["skippedClosedForms"] = failed;
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();
  std::uint64_t digest = fnv1a(read_file(problemPath));
  digest = fnv1a(method, digest);
  if (!domainPath.empty()) digest = fnv1a(read_file(domainPath), digest);
  if (!p0Path.empty()) digest = fnv1a(read_file(p0Path), digest);
  digest = fnv1a(std::to_string(g.seed), digest);
  emit_report(g, "rate", digest, std::move(outputs), ms);
  return kExitOk;
}

int run_gare(const GlobalOpts& g, const std::string& problemPath, const std::string& p0Path) {
  const auto tick = std::chrono::steady_clock::now();
  const ProblemFile p = load_problem(problemPath, {"P0"});

  std::optional<SpdMat> P0;
  if (!p0Path.empty()) {
    P0 = spd_from_json(parse_json_file(p0Path));
  } else if (p.options.contains("P0")) {
    P0 = spd_from_json(p.options.at("P0"));
  }

  json outputs;
  if (p.kind == "stdRiccati") {
    const StdRiccatiParams sp = std_params_from_json(p.params);
    const GareSolution sol = solve_std_are(sp, P0.value_or(SpdMat::Identity(sp.n())), g.tol);
    outputs = gare_solution_to_json(sol);
  } else {
    const GrdeParams gp = grde_of(p);
    const GareSolution sol = P0.has_value() ? solve_gare(gp, *P0, g.tol)
                                            : solve_gare_auto(gp, g.tol);
    outputs = gare_solution_to_json(sol);
    if (gp.strictBlock() && P0.has_value()) {
      outputs["convergenceBound"] = gare_convergence_bound(gp, sol.Pbar, *P0);
    }
  }

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();
  std::uint64_t digest = fnv1a(read_file(problemPath));
  if (!p0Path.empty()) digest = fnv1a(read_file(p0Path), digest);
  digest = fnv1a(std::to_string(g.tol), digest);
  emit_report(g, "gare", digest, std::move(outputs), ms);
  return kExitOk;
}

int run_discrete(const GlobalOpts& g, const std::string& problemPath, int samples) {
  const auto tick = std::chrono::steady_clock::now();
  const ProblemFile p = load_problem(problemPath, {"samples", "rankTol"});
  if (p.kind != "discrete") throw std::invalid_argument("a discrete problem is required");
  const DiscreteParams dp = discrete_params_from_json(p.params);
  const double rankTol = p.options.value("rankTol", 1e-10);
  const int count = samples > 0 ? samples : p.options.value("samples", 10000);

  const LipschitzReport report = lipschitz_report(dp, rankTol);
  const double empirical = empirical_lipschitz(dp, count, g.seed);
  json outputs{{"report", lipschitz_report_to_json(report)},
               {"empiricalRatio", empirical},
               {"samples", count},
               {"withinBound", empirical <= report.bound + 1e-6}};
  if (!report.strict) {
    outputs["directedRatio"] = directed_lipschitz_probe(dp, 40, g.seed);
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();
  std::uint64_t digest = fnv1a(read_file(problemPath));
  digest = fnv1a(std::to_string(count) + "," + std::to_string(g.seed), digest);
  emit_report(g, "discrete", digest, std::move(outputs), ms);
  return kExitOk;
}

int run_audit(const GlobalOpts& g, int n, const std::string& gauge, const std::string& gridSpec) {
  const auto tick = std::chrono::steady_clock::now();
  AuditGrid grid = AuditGrid::defaults(n);
  if (!gridSpec.empty() && gridSpec != "default") {
    const json j = parse_json_file(gridSpec);
    for (const auto& [key, _] : j.items()) {
      if (key != "epsilons" && key != "lambdaLast" && key != "e") {
        throw std::invalid_argument("grid: unknown field '" + key + "'");
      }
    }
    if (j.contains("epsilons")) grid.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("lambdaLast")) grid.lambdaLast = j.at("lambdaLast").get<std::vector<double>>();
    if (j.contains("e")) {
      const auto ev = j.at("e").get<std::vector<double>>();
      grid.e = Vector(ev.size());
      for (std::size_t i = 0; i < ev.size(); ++i) grid.e(i) = ev[i];
    }
  }
  const ViolationReport report = audit_nonexpansiveness(parse_gauge(gauge), n, grid);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();
  std::uint64_t digest = fnv1a(gauge + "/" + std::to_string(n) + "/" + gridSpec);
  emit_report(g, "audit-finsler", digest, violation_report_to_json(report), ms);
  return kExitOk;
}

int run_orthant(const GlobalOpts& g, const std::string& problemPath) {
  const auto tick = std::chrono::steady_clock::now();
  const ProblemFile p = load_problem(problemPath, {"points"});
  if (p.kind != "orthant") throw std::invalid_argument("an orthant problem is required");
  for (const auto& [key, _] : p.params.items()) {
    if (key != "field" && key != "c" && key != "dim") {
      throw std::invalid_argument("orthant params: unknown field '" + key + "'");
    }
  }
  const std::string fieldName = p.params.at("field").get<std::string>();

  OrthantField field;
  int n = p.params.value("dim", 1);
  if (fieldName == "negIdentity") {
    field.phi = [](double, const Vector& x) { return Vector(-x); };
    field.jacobian = [](double, const Vector& x) {
      return Matrix(-Matrix::Identity(x.size(), x.size()));
    };
  } else if (fieldName == "oneMinusXSquared") {
    n = 1;
    field.phi = [](double, const Vector& x) {
      Vector out(1);
      out(0) = 1.0 - x(0) * x(0);
      return out;
    };
    field.jacobian = [](double, const Vector& x) {
      Matrix j(1, 1);
      j(0, 0) = -2.0 * x(0);
      return j;
    };
  } else if (fieldName == "affineDecay") {
    const auto cv = p.params.at("c").get<std::vector<double>>();
    n = static_cast<int>(cv.size());
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = cv[i];
    field.phi = [c](double, const Vector& x) { return Vector(c - x); };
    field.jacobian = [](double, const Vector& x) {
      return Matrix(-Matrix::Identity(x.size(), x.size()));
    };
  } else {
    throw std::invalid_argument(
        "orthant field must be negIdentity, oneMinusXSquared or affineDecay");
  }

  std::vector<Vector> points;
  if (p.options.contains("points")) {
    for (const auto& row : p.options.at("points")) {
      const auto rv = row.get<std::vector<double>>();
      Vector v(rv.size());
      for (std::size_t i = 0; i < rv.size(); ++i) v(i) = rv[i];
      points.push_back(std::move(v));
    }
  } else {
    for (double s = 0.25; s <= 4.0 + 1e-12; s += 0.25) {
      points.push_back(Vector(s * Vector::Ones(n)));
    }
  }

  const RateCertificate cert = orthant_rate(field, points, {0.0});
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();
  emit_report(g, "orthant-rate", fnv1a(read_file(problemPath)), rate_certificate_to_json(cert),
              ms);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson-metric contraction rates of Riccati flows on the SPD cone"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "sampling seed (fixed default for reproducibility)");
  app.add_option("--tol", g.tol, "solver tolerance");
  app.add_option("--out", g.out, "write the report to this file instead of stdout");
  app.add_option("--format", g.format, "trajectory file format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", g.timing, "include wall time in the report (breaks byte determinism)");

  std::string fileA, fileB, gauge, problem, fromFile, domainFile, p0File, gridSpec = "default";
  double t0v = 0.0, t1v = 1.0;
  std::string method = "auto", trajOut;
  int samples = 0, auditN = 2;

  auto* metric = app.add_subcommand("metric", "Thompson (and optional Finsler) distance");
  metric->add_option("fileA", fileA)->required();
  metric->add_option("fileB", fileB)->required();
  metric->add_option("--gauge", gauge, "sup or a p value");

  auto* integ = app.add_subcommand("integrate", "integrate a Riccati flow");
  integ->add_option("problem", problem)->required();
  integ->add_option("--from", fromFile, "initial state JSON")->required();
  integ->add_option("--t0", t0v);
  integ->add_option("--t1", t1v)->required();
  integ->add_option("--traj-out", trajOut, "trajectory file (CSV unless --format json)");

  auto* rate = app.add_subcommand("rate", "contraction rate certificate");
  rate->add_option("problem", problem)->required();
  rate->add_option("--method", method)->check(CLI::IsMember({"auto", "general", "closed"}));
  rate->add_option("--domain", domainFile, "order-interval sampler spec JSON");
  rate->add_option("--P0", p0File, "order-interval upper bound for the GRDE closed form");

  auto* gare = app.add_subcommand("gare", "solve the generalized algebraic Riccati equation");
  gare->add_option("problem", problem)->required();
  gare->add_option("--P0", p0File, "start (certified when phi(P0) <= 0)");

  auto* disc = app.add_subcommand("discrete", "discrete operator Lipschitz analysis");
  disc->add_option("problem", problem)->required();
  disc->add_option("--samples", samples, "empirical sample pairs");

  auto* audit = app.add_subcommand("audit-finsler", "falsify non-expansiveness in d_nu");
  audit->add_option("--n", auditN, "matrix dimension");
  audit->add_option("--gauge", gauge, "sup or a p value")->required();
  audit->add_option("--grid", gridSpec, "'default' or a grid JSON file");

  auto* orth = app.add_subcommand("orthant-rate", "contraction rate on the positive orthant");
  orth->add_option("problem", problem)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (metric->parsed()) return run_metric(g, fileA, fileB, gauge);
    if (integ->parsed()) return run_integrate(g, problem, fromFile, t0v, t1v, trajOut);
    if (rate->parsed()) return run_rate(g, problem, method, domainFile, p0File);
    if (gare->parsed()) return run_gare(g, problem, p0File);
    if (disc->parsed()) return run_discrete(g, problem, samples);
    if (audit->parsed()) return run_audit(g, auditN, gauge, gridSpec);
    if (orth->parsed()) return run_orthant(g, problem);
  } catch (const DomainExitError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const FeasibilityError& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
