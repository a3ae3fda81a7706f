#include <initializer_list>
#include <set>

#include "ctlscape/cli.hpp"
#include "ctlscape/random.hpp"

namespace ctlscape::cli {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!names.count(key)) throw UsageError("unknown key \"" + key + "\" in " + where);
  }
}

double get_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw UsageError(what + " must be a number");
  return j.get<double>();
}

int get_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw UsageError(what + " must be an integer");
  return j.get<int>();
}

std::uint64_t get_seed(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned()) throw UsageError(what + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

template <typename T, typename Get>
void read(const Json& block, const char* key, T& target, Get get) {
  if (block.contains(key)) target = static_cast<T>(get(block.at(key), key));
}

std::optional<double> optional_bound(const Json& j, const std::string& what) {
  if (j.is_null()) return std::nullopt;
  return get_number(j, what);
}

ControlSystem parse_system(const Json& j) {
  if (j.contains("sampler")) {
    check_keys(j, {"sampler", "levels", "dimension", "seed", "horizon"}, "system");
    const Json& sampler = j.at("sampler");
    if (!sampler.is_string()) throw UsageError("sampler must be a string");
    const auto name = sampler.get<std::string>();
    const std::uint64_t seed = j.contains("seed") ? get_seed(j.at("seed"), "system seed") : 0;
    if (name == "quantum") {
      if (!j.contains("levels")) throw UsageError("quantum sampler needs \"levels\"");
      const int levels = get_int(j.at("levels"), "levels");
      if (!j.contains("horizon")) return sample_random_quantum_system(levels, seed);
      return sample_random_quantum_system(levels, seed, get_number(j.at("horizon"), "horizon"));
    }
    if (name == "lti") {
      if (!j.contains("dimension")) throw UsageError("lti sampler needs \"dimension\"");
      const double horizon =
          j.contains("horizon") ? get_number(j.at("horizon"), "horizon") : kDefaultLtiHorizon;
      return sample_random_lti(get_int(j.at("dimension"), "dimension"), seed, horizon);
    }
    throw UsageError("unknown sampler \"" + name + "\"");
  }
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw UsageError("system needs a \"family\" or a \"sampler\"");
  }
  const auto family = j.at("family").get<std::string>();
  Json copy = j;
  if (family == "quantum") {
    check_keys(j, {"family", "drift", "coupling", "horizon"}, "system");
    if (!copy.contains("horizon") && copy.contains("drift") && copy.at("drift").is_array()) {
      copy["horizon"] = default_quantum_horizon(static_cast<Index>(copy.at("drift").size()));
    }
  } else if (family == "lti") {
    check_keys(j, {"family", "a", "b", "x0", "horizon"}, "system");
    if (!copy.contains("horizon")) copy["horizon"] = kDefaultLtiHorizon;
  } else {
    check_keys(j, {"family", "rhs", "x0", "horizon", "a", "b", "coupling", "params"}, "system");
    if (!copy.contains("horizon")) copy["horizon"] = kDefaultLtiHorizon;
  }
  return system_from_json(copy);
}

Index system_levels(const ControlSystem& sys) {
  return std::visit(
      [](const auto& s) -> Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, QuantumControlSystem>) {
          return s.levels();
        } else {
          return s.dimension();
        }
      },
      sys);
}

Objective parse_objective(const Json& goal, const Json* kind, const ControlSystem& sys) {
  check_keys(goal, {"gate", "random_gate", "state"}, "goal");
  if (goal.size() != 1) throw UsageError("goal needs exactly one of gate, random_gate, state");
  std::optional<Objective> obj;
  if (goal.contains("gate")) {
    obj = Objective::gate_fidelity(cmatrix_from_json(goal.at("gate")));
  } else if (goal.contains("random_gate")) {
    if (!std::holds_alternative<QuantumControlSystem>(sys)) {
      throw UsageError("random_gate requires a quantum system");
    }
    Rng rng = make_rng(get_seed(goal.at("random_gate"), "random_gate"));
    obj = Objective::gate_fidelity(haar_unitary(system_levels(sys), rng));
  } else {
    obj = Objective::quadratic_cost(rvector_from_json(goal.at("state")));
  }
  if (kind) {
    if (!kind->is_string() || kind->get<std::string>() != to_string(obj->kind())) {
      throw UsageError("objective does not match the goal (gate goals use gate_fidelity, "
                       "state goals use quadratic_cost)");
    }
  }
  require_compatible(sys, *obj);
  return *obj;
}

SystemFamily parse_family(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "quantum") return SystemFamily::quantum;
  if (j.is_string() && j.get<std::string>() == "lti") return SystemFamily::lti;
  throw UsageError("measure family must be \"quantum\" or \"lti\"");
}

void parse_climb(const Json& j, ClimbConfig& c) {
  check_keys(j,
             {"max_iterations", "gradient_tolerance", "initial_step", "contraction",
              "sufficient_increase", "barzilai_borwein"},
             "climb");
  read(j, "max_iterations", c.max_iterations, get_int);
  read(j, "gradient_tolerance", c.gradient_tolerance, get_number);
  read(j, "initial_step", c.initial_step, get_number);
  read(j, "contraction", c.contraction, get_number);
  read(j, "sufficient_increase", c.sufficient_increase, get_number);
  if (j.contains("barzilai_borwein")) {
    if (!j.at("barzilai_borwein").is_boolean()) throw UsageError("barzilai_borwein must be a boolean");
    c.barzilai_borwein = j.at("barzilai_borwein").get<bool>();
  }
}

void parse_classify(const Json& j, ClassifyThresholds& t) {
  check_keys(j,
             {"gradient_tolerance", "optimum_margin", "hessian_noise", "fd_step", "power_iterations",
              "probes"},
             "classify");
  read(j, "gradient_tolerance", t.gradient_tolerance, get_number);
  read(j, "optimum_margin", t.optimum_margin, get_number);
  read(j, "hessian_noise", t.hessian_noise, get_number);
  read(j, "fd_step", t.fd_step, get_number);
  read(j, "power_iterations", t.power_iterations, get_int);
  read(j, "probes", t.probes, get_int);
}

void parse_slice(const Json& j, SliceDirective& s) {
  check_keys(j, {"center", "directions", "half_width", "grid_points"}, "slice");
  if (j.contains("center")) {
    const Json& c = j.at("center");
    if (c.is_string()) {
      s.center = c.get<std::string>();
      if (s.center != "zero" && s.center != "random" && s.center != "climb") {
        throw UsageError("slice center must be \"zero\", \"random\", \"climb\" or a vector");
      }
    } else {
      s.center = "explicit";
      s.center_values = rvector_from_json(c);
    }
  }
  if (j.contains("directions")) {
    const Json& d = j.at("directions");
    if (!(d.is_string() && d.get<std::string>() == "random")) {
      if (!d.is_array() || d.size() != 2) throw UsageError("slice directions must be two vectors");
      const RVector d1 = rvector_from_json(d[0]);
      const RVector d2 = rvector_from_json(d[1]);
      if (d1.size() != d2.size()) throw UsageError("slice directions differ in length");
      RMatrix dirs(d1.size(), 2);
      dirs << d1, d2;
      s.directions = std::move(dirs);
    }
  }
  read(j, "half_width", s.half_width, get_number);
  read(j, "grid_points", s.grid_points, get_int);
}

void parse_measure(const Json& j, MeasureDirective& m) {
  check_keys(j, {"family", "dimension", "trials"}, "measure");
  if (j.contains("family")) m.family = parse_family(j.at("family"));
  if (j.contains("dimension")) m.dimension = get_int(j.at("dimension"), "dimension");
  if (j.contains("trials")) m.trials = get_int(j.at("trials"), "trials");
}

void parse_lti_verify(const Json& j, LtiVerifyDirective& v) {
  check_keys(j, {"cases", "substeps", "tolerance"}, "lti_verify");
  read(j, "cases", v.cases, get_int);
  read(j, "substeps", v.substeps, get_int);
  read(j, "tolerance", v.tolerance, get_number);
  if (v.cases < 1) throw UsageError("lti_verify cases must be at least 1");
  if (v.substeps < 1) throw UsageError("lti_verify substeps must be at least 1");
}

Index default_intervals(const ControlSystem& sys) {
  if (const auto* q = std::get_if<QuantumControlSystem>(&sys)) return 2 * q->levels() * q->levels();
  return 16;
}

}  // namespace

ControlSystem system_for(const Descriptor& d, const SweepPoint& point) {
  if (!d.system) throw UsageError("descriptor has no system");
  if (!point.epsilon) return *d.system;
  if (const auto* lti = std::get_if<LtiControlSystem>(&*d.system)) {
    return lti_cubic(*lti, *point.epsilon);
  }
  if (const auto* nl = std::get_if<NonlinearControlSystem>(&*d.system)) {
    return nl->with_param("epsilon", *point.epsilon);
  }
  throw UsageError("epsilon sweeps apply to LTI and nonlinear systems only");
}

Descriptor parse_descriptor(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("descriptor is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"system", "goal", "objective", "intervals", "climb", "classify", "survey",
              "fluence_bound", "fluence_sweep", "epsilon_sweep", "check", "evaluation", "slice",
              "measure", "lti_verify", "seed", "out"},
             "descriptor");

  Descriptor d;
  d.digest = sha256_hex(text);
  try {
    if (j.contains("system")) {
      d.system = parse_system(j.at("system"));
      if (!j.contains("goal")) throw UsageError("descriptor has a system but no goal");
      d.objective = parse_objective(j.at("goal"), j.contains("objective") ? &j.at("objective") : nullptr,
                                    *d.system);
      d.intervals = default_intervals(*d.system);
    } else if (j.contains("goal") || j.contains("objective")) {
      throw UsageError("goal given without a system");
    }
    if (j.contains("intervals")) {
      d.intervals = get_int(j.at("intervals"), "intervals");
      if (d.intervals < 1) throw UsageError("intervals must be at least 1");
    }
    if (j.contains("climb")) parse_climb(j.at("climb"), d.climb);
    if (j.contains("classify")) parse_classify(j.at("classify"), d.thresholds);
    if (j.contains("survey")) {
      const Json& s = j.at("survey");
      check_keys(s, {"starts", "amplitude", "escalation_factor", "escalation_kick"}, "survey");
      read(s, "starts", d.starts, get_int);
      read(s, "amplitude", d.amplitude, get_number);
      read(s, "escalation_factor", d.escalation_factor, get_int);
      read(s, "escalation_kick", d.escalation_kick, get_number);
    }
    if (j.contains("fluence_bound")) {
      d.climb.fluence_bound = optional_bound(j.at("fluence_bound"), "fluence_bound");
    }
    if (j.contains("check")) {
      check_keys(j.at("check"), {"samples"}, "check");
      read(j.at("check"), "samples", d.check_samples, get_int);
    }
    if (j.contains("evaluation")) {
      check_keys(j.at("evaluation"), {"ode_substeps"}, "evaluation");
      read(j.at("evaluation"), "ode_substeps", d.ode_substeps, get_int);
      if (d.ode_substeps < 1) throw UsageError("ode_substeps must be at least 1");
    }
    if (j.contains("slice")) parse_slice(j.at("slice"), d.slice);
    if (j.contains("measure")) parse_measure(j.at("measure"), d.measure);
    if (j.contains("lti_verify")) parse_lti_verify(j.at("lti_verify"), d.lti_verify);
    if (j.contains("seed")) d.seed = get_seed(j.at("seed"), "seed");
    if (j.contains("out")) {
      if (!j.at("out").is_string()) throw UsageError("out must be a string");
      d.out = j.at("out").get<std::string>();
    }

    std::vector<std::optional<double>> fluences{d.climb.fluence_bound};
    if (j.contains("fluence_sweep")) {
      const Json& f = j.at("fluence_sweep");
      if (!f.is_array() || f.empty()) throw UsageError("fluence_sweep must be a non-empty list");
      fluences.clear();
      for (const auto& v : f) fluences.push_back(optional_bound(v, "fluence_sweep entry"));
    }
    std::vector<std::optional<double>> epsilons{std::nullopt};
    if (j.contains("epsilon_sweep")) {
      const Json& e = j.at("epsilon_sweep");
      if (!e.is_array() || e.empty()) throw UsageError("epsilon_sweep must be a non-empty list");
      if (!d.system || std::holds_alternative<QuantumControlSystem>(*d.system)) {
        throw UsageError("epsilon_sweep needs an LTI or nonlinear system");
      }
      epsilons.clear();
      for (const auto& v : e) epsilons.push_back(get_number(v, "epsilon_sweep entry"));
    }
    for (const auto& f : fluences) {
      if (f && !(*f > 0.0)) throw UsageError("fluence bounds must be positive");
      for (const auto& e : epsilons) d.sweep.push_back({f, e});
    }
    validate(d.climb);
    if (d.starts < 1) throw UsageError("survey starts must be at least 1");
    if (!(d.amplitude > 0.0)) throw UsageError("survey amplitude must be positive");
    if (d.check_samples < 1) throw UsageError("check samples must be at least 1");
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  } catch (const Json::exception& e) {
    throw UsageError(e.what());
  }
  return d;
}

}  // namespace ctlscape::cli
