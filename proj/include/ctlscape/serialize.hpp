#pragma once

#include <json.hpp>

#include "ctlscape/climb.hpp"
#include "ctlscape/controllability.hpp"
#include "ctlscape/survey.hpp"

namespace ctlscape {

using Json = nlohmann::json;

/// Matrices are nested row-major arrays. Complex entries are [re, im] pairs;
/// readers also accept plain numbers for purely real entries.
Json to_json(const RVector& v);
Json to_json(const RMatrix& m);
Json to_json(const CMatrix& m);

RVector rvector_from_json(const Json& j);
RMatrix rmatrix_from_json(const Json& j);
CMatrix cmatrix_from_json(const Json& j);

/// {"family": "quantum" | "lti" | "nonlinear", ...} with the defining data of
/// each family; round-trips exactly.
Json to_json(const ControlSystem& sys);
ControlSystem system_from_json(const Json& j);

Json to_json(const AssumptionReport& report);
Json to_json(const VandermondeCheck& check);
Json to_json(const MeasureResult& result);
Json to_json(const CriticalPointRecord& record);
Json to_json(const ClimbResult& result);

/// One line-delimited record per survey start.
Json to_json(const ClimbDigest& digest, double optimum, double margin);

/// Summary statistics without the per-start records.
Json summary_to_json(const SurveySummary& summary);

}  // namespace ctlscape
