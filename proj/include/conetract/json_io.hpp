#pragma once

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

#include "conetract/discrete.hpp"
#include "conetract/flow.hpp"
#include "conetract/gare.hpp"
#include "conetract/gauge.hpp"
#include "conetract/matrix_types.hpp"
#include "conetract/rates.hpp"
#include "conetract/riccati.hpp"

namespace conetract {

using json = nlohmann::ordered_json;

// Symmetric matrices serialize as {"dim": n, "rows": [[...], ...]};
// deserialization enforces the symmetry tolerance. General (possibly
// rectangular) matrices use {"rows": [[...], ...]}.
json matrix_to_json(const Matrix& m);
json sym_to_json(const SymMat& s);
Matrix matrix_from_json(const json& j);
SymMat sym_from_json(const json& j);
SpdMat spd_from_json(const json& j);

GrdeParams grde_params_from_json(const json& j);
StdRiccatiParams std_params_from_json(const json& j);
DiscreteParams discrete_params_from_json(const json& j);
json grde_params_to_json(const GrdeParams& p);

json rate_certificate_to_json(const RateCertificate& c);
json gare_solution_to_json(const GareSolution& s);
json verify_result_to_json(const VerifyResult& v);
json lipschitz_report_to_json(const LipschitzReport& r);
json violation_report_to_json(const ViolationReport& r);
json trajectory_to_json(const Trajectory& t);

/// CSV export: header "t" then the n(n+1)/2 upper-triangle entries p_i_j.
void trajectory_to_csv(const Trajectory& t, std::ostream& out);

}  // namespace conetract
