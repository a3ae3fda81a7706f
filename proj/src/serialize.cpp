#include "ctlscape/serialize.hpp"

#include <string>

namespace ctlscape {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InvalidArgument(std::string(what) + " must be a number");
  return j.get<double>();
}

Complex complex_entry(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], "real part"), number(j[1], "imaginary part")};
  throw InvalidArgument("complex entries must be numbers or [re, im] pairs");
}

template <typename Entry>
auto matrix_from_json(const Json& j, Entry entry) {
  using Scalar = decltype(entry(j));
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw InvalidArgument("matrices must be non-empty nested arrays");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j[0].size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InvalidArgument("matrix rows must all have the same length");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = entry(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const RVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const RMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

RVector rvector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("vectors must be arrays of numbers");
  RVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], "vector entry");
  return v;
}

RMatrix rmatrix_from_json(const Json& j) {
  return matrix_from_json(j, [](const Json& e) { return number(e, "matrix entry"); });
}

CMatrix cmatrix_from_json(const Json& j) { return matrix_from_json(j, complex_entry); }

Json to_json(const ControlSystem& sys) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuantumControlSystem>) {
          return {{"family", "quantum"},
                  {"drift", to_json(s.drift())},
                  {"coupling", to_json(s.coupling())},
                  {"horizon", s.horizon()}};
        } else if constexpr (std::is_same_v<T, LtiControlSystem>) {
          return {{"family", "lti"},
                  {"a", to_json(s.a())},
                  {"b", to_json(s.b())},
                  {"x0", to_json(s.x0())},
                  {"horizon", s.horizon()}};
        } else {
          Json j = {{"family", "nonlinear"},
                    {"rhs", s.rhs()},
                    {"x0", to_json(s.x0())},
                    {"horizon", s.horizon()},
                    {"params", s.params()}};
          if (s.a().size() > 0) j["a"] = to_json(s.a());
          if (s.b().size() > 0) j["b"] = to_json(s.b());
          if (s.coupling().size() > 0) j["coupling"] = to_json(s.coupling());
          return j;
        }
      },
      sys);
}

ControlSystem system_from_json(const Json& j) {
  const Json& family = field(j, "family");
  if (!family.is_string()) throw InvalidArgument("system family must be a string");
  const auto name = family.get<std::string>();
  const double horizon = number(field(j, "horizon"), "horizon");
  if (name == "quantum") {
    return QuantumControlSystem(cmatrix_from_json(field(j, "drift")),
                                cmatrix_from_json(field(j, "coupling")), horizon);
  }
  if (name == "lti") {
    return LtiControlSystem(rmatrix_from_json(field(j, "a")), rvector_from_json(field(j, "b")),
                            rvector_from_json(field(j, "x0")), horizon);
  }
  if (name == "nonlinear") {
    std::map<std::string, double> params;
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) params[k] = number(v, "parameter");
    }
    const Json& rhs = field(j, "rhs");
    if (!rhs.is_string()) throw InvalidArgument("rhs must be a string");
    return NonlinearControlSystem(
        rhs.get<std::string>(), rvector_from_json(field(j, "x0")), horizon,
        j.contains("a") ? rmatrix_from_json(j.at("a")) : RMatrix(),
        j.contains("b") ? rvector_from_json(j.at("b")) : RVector(),
        j.contains("coupling") ? rmatrix_from_json(j.at("coupling")) : RMatrix(),
        std::move(params));
  }
  throw InvalidArgument("unknown system family \"" + name + "\"");
}

Json to_json(const AssumptionReport& report) {
  const auto& a1 = report.assumption1;
  const auto& a2 = report.assumption2;
  const auto& a3 = report.assumption3;
  return {{"seed", report.seed},
          {"assumption1",
           {{"verdict", to_string(a1.verdict)},
            {"method", a1.method},
            {"evidence", a1.evidence},
            {"required", a1.required},
            {"traceless_rank", a1.traceless_rank},
            {"depth_reached", a1.depth_reached}}},
          {"assumption2",
           {{"verdict", to_string(a2.verdict)},
            {"min_overlap", a2.min_overlap},
            {"samples", a2.samples},
            {"holds", a2.holds},
            {"fails", a2.fails},
            {"not_applicable", a2.not_applicable}}},
          {"assumption3",
           {{"intervals", a3.intervals},
            {"horizon", a3.horizon},
            {"fluence_bound", optional_number(a3.fluence_bound)}}}};
}

Json to_json(const VandermondeCheck& check) {
  return {{"lhs", check.lhs},
          {"rhs", check.rhs},
          {"rhs_imag", check.rhs_imag},
          {"relative_residual", check.relative_residual},
          {"min_eigenvalue_gap", check.min_eigenvalue_gap}};
}

Json to_json(const MeasureResult& result) {
  int holds = 0;
  for (auto v : result.verdicts) holds += v == Verdict::holds;
  return {{"trials", result.verdicts.size()},
          {"controllable", holds},
          {"fraction_controllable", result.fraction_controllable}};
}

Json to_json(const CriticalPointRecord& record) {
  return {{"value", record.value},
          {"gradient_norm", record.gradient_norm},
          {"min_eigenvalue", optional_number(record.min_eigenvalue)},
          {"max_eigenvalue", optional_number(record.max_eigenvalue)},
          {"classification", to_string(record.classification)}};
}

Json to_json(const ClimbResult& result) {
  return {{"termination", to_string(result.termination)},
          {"iterations", result.iterations},
          {"function_evaluations", result.function_evaluations},
          {"gradient_evaluations", result.gradient_evaluations},
          {"final_gradient_norm", result.final_gradient_norm},
          {"initial_value", result.trace.front()},
          {"final_value", result.trace.back()},
          {"trace", result.trace},
          {"final_control", to_json(result.final_control.values())}};
}

Json to_json(const ClimbDigest& digest, double optimum, double margin) {
  Json j = {{"start", digest.start},
            {"seed", digest.seed},
            {"converged", digest.converged(optimum, margin)},
            {"climb", digest.climb ? to_json(*digest.climb) : Json(nullptr)},
            {"escalation", digest.escalation ? to_json(*digest.escalation) : Json(nullptr)},
            {"error", digest.error.empty() ? Json(nullptr) : Json(digest.error)}};
  if (digest.error.empty()) {
    j["first_terminus"] = to_json(digest.first_terminus);
    j["terminus"] = to_json(digest.terminus);
  } else {
    j["first_terminus"] = nullptr;
    j["terminus"] = nullptr;
  }
  return j;
}

Json summary_to_json(const SurveySummary& s) {
  return {{"starts", s.climbs.size()},
          {"seed", s.seed},
          {"converged_fraction", s.converged_fraction},
          {"trapped_fraction", s.trapped_fraction},
          {"other_fraction", s.other_fraction},
          {"trap_candidates", s.trap_candidates},
          {"saddle_encounters", s.saddle_encounters},
          {"escalations", s.escalations},
          {"monotonicity_violations", s.monotonicity_violations},
          {"median_iterations", s.median_iterations},
          {"max_iterations", s.max_iterations},
          {"total_function_evaluations", s.total_function_evaluations},
          {"total_gradient_evaluations", s.total_gradient_evaluations}};
}

}  // namespace ctlscape
