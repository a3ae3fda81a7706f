#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctlscape/cli.hpp"
#include "ctlscape/random.hpp"

namespace ctlscape::cli {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

class Run {
 public:
  Run(std::string command, Descriptor d, std::uint64_t seed, std::string prefix, int workers)
      : command_(std::move(command)),
        d_(std::move(d)),
        seed_(seed),
        prefix_(std::move(prefix)),
        workers_(workers),
        started_(utc_now()) {}

  const Descriptor& descriptor() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  int workers() const { return workers_; }

  void write(const std::string& suffix, const std::string& content) {
    const std::filesystem::path path(prefix_ + suffix);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + path.string());
    outputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(content)}});
  }

  void write_json(const std::string& suffix, Json j) {
    j["descriptor_digest"] = d_.digest;
    write(suffix, j.dump(2) + "\n");
  }

  void finish(int exit_code) {
    const Json manifest = {{"tool", "ctlscape"},
                           {"version", kToolVersion},
                           {"command", command_},
                           {"descriptor_digest", d_.digest},
                           {"seed", seed_},
                           {"workers", workers_},
                           {"started", started_},
                           {"finished", utc_now()},
                           {"exit_code", exit_code},
                           {"outputs", outputs_}};
    const std::filesystem::path path(prefix_ + ".manifest.json");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << manifest.dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write " + path.string());
  }

  const ControlSystem& system() const {
    if (!d_.system) throw UsageError("the " + command_ + " command needs a system and goal");
    return *d_.system;
  }

  Landscape landscape(const SweepPoint& point) const {
    system();
    return Landscape(system_for(d_, point), *d_.objective, EvaluationOptions{d_.ode_substeps});
  }

  SurveyConfig survey_config(const SweepPoint& point) const {
    SurveyConfig cfg;
    cfg.intervals = d_.intervals;
    cfg.starts = d_.starts;
    cfg.amplitude = d_.amplitude;
    cfg.climb = d_.climb;
    cfg.climb.fluence_bound = point.fluence_bound;
    cfg.thresholds = d_.thresholds;
    cfg.escalation_factor = d_.escalation_factor;
    cfg.escalation_kick = d_.escalation_kick;
    cfg.seed = seed_;
    return cfg;
  }

  std::string climb_record(int run, const SweepPoint& point, const ClimbDigest& digest,
                           double optimum) const {
    Json j = to_json(digest, optimum, d_.thresholds.optimum_margin);
    j["descriptor_digest"] = d_.digest;
    j["run"] = run;
    j["fluence_bound"] = optional_number(point.fluence_bound);
    j["epsilon"] = optional_number(point.epsilon);
    return j.dump() + "\n";
  }

 private:
  std::string command_;
  Descriptor d_;
  std::uint64_t seed_;
  std::string prefix_;
  int workers_;
  std::string started_;
  Json outputs_ = Json::array();
};

int verdict_exit(std::initializer_list<Verdict> verdicts) {
  int code = kSuccess;
  for (auto v : verdicts) {
    if (v == Verdict::fails) return kAssumptionFailure;
    if (v == Verdict::inconclusive || v == Verdict::not_applicable) code = kInconclusive;
  }
  return code;
}

int cmd_check(Run& r, std::ostream& out) {
  const Descriptor& d = r.descriptor();
  AssessmentOptions opts;
  opts.intervals = d.intervals;
  opts.samples = d.check_samples;
  opts.amplitude = d.amplitude;
  opts.fluence_bound = d.climb.fluence_bound;
  opts.seed = r.seed();
  opts.evaluation.ode_substeps = d.ode_substeps;
  const AssumptionReport report = assess_assumptions(r.system(), *d.objective, opts);
  const int code = verdict_exit({report.assumption1.verdict, report.assumption2.verdict});

  Json j = to_json(report);
  j["system_fingerprint"] = sha256_hex(to_json(r.system()).dump());
  j["objective"] = to_string(d.objective->kind());
  j["exit_code"] = code;
  r.write_json(".check.json", std::move(j));

  out << "assumption I: " << to_string(report.assumption1.verdict) << " ("
      << report.assumption1.method << ", " << report.assumption1.evidence << "/"
      << report.assumption1.required << ")\n"
      << "assumption II: " << to_string(report.assumption2.verdict) << " ("
      << report.assumption2.holds << " holds, " << report.assumption2.fails << " fails, "
      << report.assumption2.not_applicable << " not applicable)\n";
  return code;
}

int cmd_climb(Run& r, std::ostream& out) {
  const SweepPoint point{r.descriptor().climb.fluence_bound, std::nullopt};
  const Landscape landscape = r.landscape(point);
  const ClimbDigest digest = run_start(landscape, r.survey_config(point), 0);
  r.write(".climbs.jsonl", r.climb_record(0, point, digest, landscape.optimum()));

  if (!digest.error.empty()) {
    out << "climb failed: " << digest.error << "\n";
    return kObjectiveNotMet;
  }
  const ClimbResult& last = *digest.last_climb();
  const bool met = digest.converged(landscape.optimum(), r.descriptor().thresholds.optimum_margin) &&
                   last.termination == Termination::converged_gradient;
  out << "final value " << format_double(last.trace.back()) << " after " << digest.iterations()
      << " iterations (" << to_string(last.termination) << ", terminus "
      << to_string(digest.terminus.classification) << ")\n";
  return met ? kSuccess : kObjectiveNotMet;
}

int cmd_survey(Run& r, std::ostream& out) {
  const Descriptor& d = r.descriptor();
  r.system();
  std::string records;
  Json runs = Json::array();
  bool trapped = false;
  for (std::size_t i = 0; i < d.sweep.size(); ++i) {
    const SweepPoint& point = d.sweep[i];
    const Landscape landscape = r.landscape(point);
    const SurveySummary s = survey(landscape, r.survey_config(point), r.workers());
    for (const auto& digest : s.climbs) {
      records += r.climb_record(static_cast<int>(i), point, digest, landscape.optimum());
    }
    Json summary = summary_to_json(s);
    summary["run"] = i;
    summary["fluence_bound"] = optional_number(point.fluence_bound);
    summary["epsilon"] = optional_number(point.epsilon);
    runs.push_back(std::move(summary));
    trapped = trapped || s.trap_candidates > 0;

    out << "run " << i << ": converged " << format_double(s.converged_fraction) << ", trapped "
        << format_double(s.trapped_fraction) << ", saddles " << s.saddle_encounters
        << ", median iterations " << s.median_iterations << "\n";
  }
  r.write(".climbs.jsonl", records);
  r.write_json(".survey.json", {{"seed", r.seed()},
                                {"objective", to_string(d.objective->kind())},
                                {"intervals", d.intervals},
                                {"runs", std::move(runs)}});
  return trapped ? kObjectiveNotMet : kSuccess;
}

RMatrix slice_directions(const Run& r, Index m) {
  const Descriptor& d = r.descriptor();
  if (d.slice.directions) {
    if (d.slice.directions->rows() != m) throw UsageError("slice directions must have length M");
    return *d.slice.directions;
  }
  if (m < 2) throw UsageError("random slice directions need at least two intervals");
  Rng rng = make_rng(derive_seed(r.seed(), 0x736c696365ULL));
  const RVector d1 = random_direction(m, rng);
  RVector d2 = random_direction(m, rng);
  d2 -= d1.dot(d2) * d1;
  RMatrix dirs(m, 2);
  dirs << d1, d2.normalized();
  return dirs;
}

int cmd_slice(Run& r, std::ostream& out) {
  const Descriptor& d = r.descriptor();
  const SweepPoint point{d.climb.fluence_bound, std::nullopt};
  const Landscape landscape = r.landscape(point);
  const SurveyConfig cfg = r.survey_config(point);
  const Index m = d.intervals;

  SliceSpec spec;
  if (d.slice.center == "zero") {
    spec.center = RVector::Zero(m);
  } else if (d.slice.center == "random") {
    spec.center = initial_control(landscape, cfg, 0).values();
  } else if (d.slice.center == "climb") {
    const ClimbDigest digest = run_start(landscape, cfg, 0);
    if (!digest.error.empty()) throw std::runtime_error("centering climb failed: " + digest.error);
    spec.center = digest.last_climb()->final_control.values();
  } else {
    if (d.slice.center_values.size() != m) throw UsageError("slice center must have length M");
    spec.center = d.slice.center_values;
  }
  const RMatrix dirs = slice_directions(r, m);
  spec.direction1 = dirs.col(0);
  spec.direction2 = dirs.col(1);
  spec.half_width = d.slice.half_width;
  spec.grid_points = d.slice.grid_points;
  const SliceGrid grid = landscape_slice(landscape, spec, r.workers());

  std::ostringstream csv;
  csv << "# descriptor_digest " << d.digest << "\n"
      << "# objective " << to_string(d.objective->kind()) << ", intervals " << m << ", center "
      << d.slice.center << "\n"
      << "# a: coefficient of slice direction 1, b: coefficient of slice direction 2\n"
      << "a,b,objective\n";
  for (Index i = 0; i < grid.a.size(); ++i)
    for (Index j = 0; j < grid.b.size(); ++j)
      csv << format_double(grid.a(i)) << "," << format_double(grid.b(j)) << ","
          << format_double(grid.values(i, j)) << "\n";
  r.write(".slice.csv", csv.str());
  out << "slice " << grid.a.size() << "x" << grid.b.size() << ", max "
      << format_double(grid.values.maxCoeff()) << ", min " << format_double(grid.values.minCoeff())
      << "\n";
  return kSuccess;
}

int cmd_measure(Run& r, std::ostream& out) {
  const MeasureDirective& m = r.descriptor().measure;
  if (!m.family || !m.dimension || !m.trials) {
    throw UsageError("measure needs a family, a dimension and a trial count");
  }
  if (*m.trials < 1) throw UsageError("measure needs at least one trial");
  MeasureResult result;
  try {
    result = sample_controllability_measure(*m.family, *m.dimension, *m.trials, r.seed(),
                                            r.workers());
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  Json j = to_json(result);
  j["family"] = to_string(*m.family);
  j["dimension"] = *m.dimension;
  j["seed"] = r.seed();
  r.write_json(".measure.json", std::move(j));

  bool fails = false;
  bool inconclusive = false;
  for (auto v : result.verdicts) {
    fails = fails || v == Verdict::fails;
    inconclusive = inconclusive || v == Verdict::inconclusive;
  }
  out << to_string(*m.family) << " dimension " << *m.dimension << ": fraction controllable "
      << format_double(result.fraction_controllable) << " over " << *m.trials << " trials\n";
  if (fails) return kAssumptionFailure;
  return inconclusive ? kInconclusive : kSuccess;
}

int cmd_lti_verify(Run& r, std::ostream& out) {
  const Descriptor& d = r.descriptor();
  const auto* sys = std::get_if<LtiControlSystem>(&r.system());
  if (!sys) throw UsageError("lti-verify needs an LTI system");
  const LtiVerifyDirective& v = d.lti_verify;

  double max_residual = 0.0;
  Json cases = Json::array();
  const NonlinearControlSystem wrapped = lti_wrapper(*sys);
  for (int i = 0; i < v.cases; ++i) {
    Rng rng = make_rng(derive_seed(r.seed(), static_cast<std::uint64_t>(i)));
    const PiecewiseControl w(uniform_box(d.intervals, d.amplitude, rng), sys->horizon());
    const RVector closed = propagate_lti_closed_form(*sys, w);
    const RVector numeric = integrate_ode(wrapped, w, v.substeps);
    const double diff = (closed - numeric).norm();
    const double scale = closed.norm();
    const double residual = scale > 0.0 ? diff / scale : diff;
    max_residual = std::max(max_residual, residual);
    cases.push_back({{"case", i}, {"closed_form", to_json(closed)}, {"numeric", to_json(numeric)},
                     {"relative_residual", residual}});
  }

  Json vandermonde;
  bool vandermonde_ok = true;
  try {
    const VandermondeCheck check = vandermonde_identity_check(sys->a(), sys->b());
    vandermonde = to_json(check);
    vandermonde["status"] = check.relative_residual < v.tolerance ? "passed" : "failed";
    vandermonde_ok = check.relative_residual < v.tolerance;
  } catch (const DegenerateSpectrumError& e) {
    vandermonde = {{"status", "not-applicable"}, {"reason", e.what()}};
  }
  const LtiControllability kalman = is_lti_controllable(sys->a(), sys->b());
  const bool endpoint_ok = max_residual < v.tolerance;

  r.write_json(".lti_verify.json",
               {{"seed", r.seed()},
                {"intervals", d.intervals},
                {"substeps", v.substeps},
                {"tolerance", v.tolerance},
                {"endpoint",
                 {{"status", endpoint_ok ? "passed" : "failed"},
                  {"max_relative_residual", max_residual},
                  {"cases", std::move(cases)}}},
                {"vandermonde", std::move(vandermonde)},
                {"kalman", {{"controllable", kalman.controllable}, {"rank", kalman.rank}}}});
  out << "endpoint max relative residual " << format_double(max_residual) << ", vandermonde "
      << (vandermonde_ok ? "ok" : "failed") << "\n";
  return endpoint_ok && vandermonde_ok ? kSuccess : kObjectiveNotMet;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read descriptor " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Control landscape analysis toolkit", "ctlscape"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> prefix;
  int workers = 1;
  std::string config;
  app.add_option("--seed", seed, "Master seed (overrides the descriptor)");
  app.add_option("--out", prefix, "Output path prefix (overrides the descriptor)");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", config, "Experiment descriptor (JSON)");
  app.add_flag_callback("--version", [&out] {
    out << "ctlscape " << kToolVersion << "\n";
    throw CLI::Success();
  });

  using Handler = int (*)(Run&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"check", "Assess controllability and the gradient-direction condition", cmd_check},
      {"climb", "Run one seeded gradient climb", cmd_climb},
      {"survey", "Multi-start census of climb termini", cmd_survey},
      {"slice", "Evaluate the landscape on a 2-D grid", cmd_slice},
      {"measure", "Fraction of random systems that are controllable", cmd_measure},
      {"lti-verify", "Cross-check the LTI closed form and the Vandermonde identity", cmd_lti_verify},
  };
  std::string positional;
  std::string family;
  std::optional<int> dimension;
  std::optional<int> trials;
  for (const auto& [name, help, handler] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("descriptor", positional, "Experiment descriptor (JSON)");
    if (name == "measure") {
      sub->add_option("--family", family, "quantum or lti")->check(CLI::IsMember({"quantum", "lti"}));
      sub->add_option("--dimension", dimension, "Levels (quantum) or state dimension (lti)");
      sub->add_option("--trials", trials, "Number of sampled systems");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Handler handler = nullptr;
  for (const auto& [name, help, h] : commands) {
    if (name == chosen->get_name()) handler = h;
  }

  try {
    if (!config.empty() && !positional.empty() && config != positional) {
      throw UsageError("give the descriptor either positionally or with --config, not both");
    }
    const std::string path = config.empty() ? positional : config;
    Descriptor d;
    if (!path.empty()) {
      d = parse_descriptor(read_file(path));
    } else if (chosen->get_name() != "measure") {
      throw UsageError("the " + chosen->get_name() + " command needs a descriptor");
    }
    if (chosen->get_name() == "measure") {
      if (!family.empty()) d.measure.family = family == "quantum" ? SystemFamily::quantum : SystemFamily::lti;
      if (dimension) d.measure.dimension = *dimension;
      if (trials) d.measure.trials = *trials;
      if (path.empty()) {
        const MeasureDirective& m = d.measure;
        d.digest = sha256_hex(Json{{"family", m.family ? Json(to_string(*m.family)) : Json(nullptr)},
                                   {"dimension", m.dimension ? Json(*m.dimension) : Json(nullptr)},
                                   {"trials", m.trials ? Json(*m.trials) : Json(nullptr)}}
                                  .dump());
      }
    }
    const std::uint64_t master = seed ? *seed : d.seed.value_or(0);
    const std::string out_prefix = prefix ? *prefix : d.out.value_or("ctlscape");
    Run r(chosen->get_name(), std::move(d), master, out_prefix, workers);
    const int code = handler(r, out);
    r.finish(code);
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kObjectiveNotMet;
  }
}

}  // namespace ctlscape::cli
