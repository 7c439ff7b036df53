#include "conetract/json_io.hpp"

#include <ostream>
#include <set>

namespace conetract {

namespace {

void require_keys(const json& j, const std::set<std::string>& required,
                  const std::set<std::string>& optional, const char* what) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(what) + ": JSON object expected");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string(what) + ": missing field '" + key + "'");
    }
  }
  for (const auto& [key, _] : j.items()) {
    if (required.count(key) == 0 && optional.count(key) == 0) {
      throw std::invalid_argument(std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

json rows_of(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix rows_from(const json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw std::invalid_argument(std::string(what) + ": 'rows' must be a non-empty array");
  }
  const std::size_t nrows = rows.size();
  const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
  if (ncols == 0) {
    throw std::invalid_argument(std::string(what) + ": rows must be non-empty arrays");
  }
  Matrix m(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i) {
    if (!rows[i].is_array() || rows[i].size() != ncols) {
      throw std::invalid_argument(std::string(what) + ": ragged rows");
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!rows[i][j].is_number()) {
        throw std::invalid_argument(std::string(what) + ": entries must be numbers");
      }
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

}  // namespace

json matrix_to_json(const Matrix& m) { return json{{"rows", rows_of(m)}}; }

json sym_to_json(const SymMat& s) {
  return json{{"dim", s.dim()}, {"rows", rows_of(s.mat())}};
}

Matrix matrix_from_json(const json& j) {
  require_keys(j, {"rows"}, {"dim"}, "matrix");
  Matrix m = rows_from(j.at("rows"), "matrix");
  if (j.contains("dim")) {
    const int d = j.at("dim").get<int>();
    if (m.rows() != d || m.cols() != d) {
      throw std::invalid_argument("matrix: 'dim' disagrees with 'rows'");
    }
  }
  return m;
}

SymMat sym_from_json(const json& j) {
  require_keys(j, {"dim", "rows"}, {}, "symmetric matrix");
  Matrix m = rows_from(j.at("rows"), "symmetric matrix");
  const int d = j.at("dim").get<int>();
  if (m.rows() != d || m.cols() != d) {
    throw std::invalid_argument("symmetric matrix: 'dim' disagrees with 'rows'");
  }
  return SymMat(std::move(m));
}

SpdMat spd_from_json(const json& j) { return SpdMat(sym_from_json(j)); }

GrdeParams grde_params_from_json(const json& j) {
  require_keys(j, {"A", "B", "C", "D", "L", "Q", "R"}, {}, "grde params");
  return GrdeParams(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                    matrix_from_json(j.at("C")), matrix_from_json(j.at("D")),
                    matrix_from_json(j.at("L")), sym_from_json(j.at("Q")),
                    sym_from_json(j.at("R")));
}

StdRiccatiParams std_params_from_json(const json& j) {
  require_keys(j, {"A", "Sigma", "Dmat"}, {}, "std riccati params");
  return StdRiccatiParams(matrix_from_json(j.at("A")), sym_from_json(j.at("Sigma")),
                          sym_from_json(j.at("Dmat")));
}

DiscreteParams discrete_params_from_json(const json& j) {
  require_keys(j, {"A", "B", "C", "D", "Q", "R"}, {}, "discrete params");
  return DiscreteParams(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                        matrix_from_json(j.at("C")), matrix_from_json(j.at("D")),
                        spd_from_json(j.at("Q")), spd_from_json(j.at("R")));
}

json grde_params_to_json(const GrdeParams& p) {
  return json{{"A", matrix_to_json(p.A)}, {"B", matrix_to_json(p.B)},
              {"C", matrix_to_json(p.C)}, {"D", matrix_to_json(p.D)},
              {"L", matrix_to_json(p.L)}, {"Q", sym_to_json(p.Q)},
              {"R", sym_to_json(p.R)}};
}

json rate_certificate_to_json(const RateCertificate& c) {
  json witnesses = json::array();
  for (const auto& w : c.witnesses) {
    witnesses.push_back(json{{"point", rows_of(w.point)},
                             {"time", w.time},
                             {"value", w.value},
                             {"kind", w.kind}});
  }
  return json{{"rate", c.rate},
              {"domain", c.domain},
              {"method", to_string(c.method)},
              {"rigor", to_string(c.rigor)},
              {"soundness", c.soundness},
              {"witnesses", std::move(witnesses)},
              {"seed", c.seed}};
}

json gare_solution_to_json(const GareSolution& s) {
  json out{{"Pbar", sym_to_json(s.Pbar.sym())},
           {"residualNorm", s.residualNorm},
           {"feasibilityMargin", s.feasibilityMargin},
           {"heuristic", s.heuristic},
           {"diagnostics",
            json{{"newtonIterations", s.newtonIterations},
                 {"integrationTime", s.integrationTime},
                 {"pathLength", s.path.size()}}}};
  if (s.certificate.has_value()) {
    out["certificate"] = rate_certificate_to_json(*s.certificate);
  }
  return out;
}

json verify_result_to_json(const VerifyResult& v) {
  json out{{"feasible", v.feasible}, {"feasibilityMargin", v.feasibilityMargin}};
  if (v.feasible) {
    out["residualNorm"] = v.residualNorm;
  } else {
    out["residualNorm"] = nullptr;
  }
  return out;
}

json lipschitz_report_to_json(const LipschitzReport& r) {
  json out{{"nonExpansive", r.nonExpansive},
           {"strict", r.strict},
           {"residual", r.residual},
           {"bound", r.bound},
           {"rankTol", r.rankTol}};
  if (r.S.has_value()) out["S"] = matrix_to_json(*r.S);
  if (r.nu.has_value()) out["nu"] = *r.nu;
  return out;
}

json violation_report_to_json(const ViolationReport& r) {
  json witnesses = json::array();
  for (const auto& w : r.witnesses) {
    witnesses.push_back(json{{"epsilon", w.epsilon},
                             {"e", vector_to_json(w.e)},
                             {"lambda", vector_to_json(w.lambda)},
                             {"mu", vector_to_json(w.mu)},
                             {"value", w.value}});
  }
  return json{{"gauge", r.gauge}, {"witnesses", std::move(witnesses)}, {"maxValue", r.maxValue}};
}

json trajectory_to_json(const Trajectory& t) {
  json states = json::array();
  for (const auto& s : t.states) states.push_back(sym_to_json(s.sym()));
  json out{{"times", t.times}, {"states", std::move(states)},
           {"exitReason", to_string(t.exitReason)}};
  out["exitTime"] = t.exitTime.has_value() ? json(*t.exitTime) : json(nullptr);
  return out;
}

void trajectory_to_csv(const Trajectory& t, std::ostream& out) {
  const int n = t.states.front().dim();
  out << "t";
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out << ",p_" << i + 1 << "_" << j + 1;
  out << "\n";
  out.precision(17);
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    out << t.times[k];
    const Matrix& m = t.states[k].mat();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) out << "," << m(i, j);
    out << "\n";
  }
}

}  // namespace conetract
