#include "ctlscape/survey.hpp"

#include <algorithm>
#include <cmath>

#include "ctlscape/random.hpp"

namespace ctlscape {

namespace {

void validate(const SurveyConfig& cfg) {
  if (cfg.starts < 1) throw InvalidArgument("a survey needs at least one start");
  if (cfg.intervals < 1) throw InvalidArgument("intervals must be at least 1");
  if (!(cfg.amplitude > 0.0)) throw InvalidArgument("initial amplitude must be positive");
  if (cfg.escalation_factor < 1) throw InvalidArgument("escalation factor must be at least 1");
  validate(cfg.climb);
}

RVector grid_axis(int points, double half_width) {
  if (points == 1) return RVector::Zero(1);
  return RVector::LinSpaced(points, -half_width, half_width);
}

void validate(const Landscape& landscape, const SliceSpec& spec) {
  const Index m = spec.center.size();
  if (m < 1 || spec.direction1.size() != m || spec.direction2.size() != m) {
    throw InvalidArgument("slice center and directions must share the control dimension");
  }
  if (spec.grid_points < 1) throw InvalidArgument("grid_points must be at least 1");
  if (!(spec.half_width >= 0.0)) throw InvalidArgument("half_width must be non-negative");
  RMatrix dirs(m, 2);
  dirs << spec.direction1, spec.direction2;
  Eigen::JacobiSVD<RMatrix> svd(dirs);
  const RVector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0)) {
    throw InvalidArgument("slice directions must be linearly independent");
  }
  (void)landscape;
}

double slice_value(const Landscape& landscape, const SliceSpec& spec, double a, double b) {
  const PiecewiseControl w(spec.center + a * spec.direction1 + b * spec.direction2,
                           landscape.horizon());
  return landscape.value(w);
}

}  // namespace

const ClimbResult* ClimbDigest::last_climb() const {
  if (escalation) return &*escalation;
  if (climb) return &*climb;
  return nullptr;
}

bool ClimbDigest::converged(double optimum, double margin) const {
  return error.empty() && terminus.value >= optimum - margin;
}

int ClimbDigest::iterations() const {
  return (climb ? climb->iterations : 0) + (escalation ? escalation->iterations : 0);
}

int ClimbDigest::function_evaluations() const {
  return (climb ? climb->function_evaluations : 0) +
         (escalation ? escalation->function_evaluations : 0);
}

int ClimbDigest::gradient_evaluations() const {
  return (climb ? climb->gradient_evaluations : 0) +
         (escalation ? escalation->gradient_evaluations : 0);
}

PiecewiseControl initial_control(const Landscape& landscape, const SurveyConfig& cfg, int index) {
  Rng rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));
  return PiecewiseControl(uniform_box(cfg.intervals, cfg.amplitude, rng), landscape.horizon());
}

ClimbDigest run_start(const Landscape& landscape, const SurveyConfig& cfg, int index) {
  ClimbDigest digest;
  digest.start = index;
  digest.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(index));
  try {
    ClassifyThresholds thresholds = cfg.thresholds;
    thresholds.seed = derive_seed(digest.seed, 1);

    digest.climb = gradient_ascent(landscape, initial_control(landscape, cfg, index), cfg.climb);
    digest.first_terminus =
        classify_critical_point(landscape, digest.climb->final_control, thresholds);
    digest.terminus = digest.first_terminus;

    const double optimum = landscape.optimum();
    if (digest.terminus.value < optimum - thresholds.optimum_margin) {
      ClimbConfig escalated = cfg.climb;
      escalated.max_iterations *= cfg.escalation_factor;
      RVector restart = digest.climb->final_control.values();
      if (digest.first_terminus.classification != PointClass::not_critical) {
        Rng rng = make_rng(derive_seed(digest.seed, 2));
        restart += cfg.escalation_kick * random_direction(restart.size(), rng);
      }
      digest.escalation = gradient_ascent(
          landscape, digest.climb->final_control.with_values(std::move(restart)), escalated);
      thresholds.seed = derive_seed(digest.seed, 3);
      digest.terminus =
          classify_critical_point(landscape, digest.escalation->final_control, thresholds);
    }
  } catch (const std::exception& e) {
    digest.error = e.what();
  }
  return digest;
}

SurveySummary summarize(std::vector<ClimbDigest> climbs, const SurveyConfig& cfg,
                        double optimum) {
  SurveySummary s;
  s.seed = cfg.seed;
  const double margin = cfg.thresholds.optimum_margin;
  int converged = 0;
  std::vector<int> iterations;
  iterations.reserve(climbs.size());
  for (const auto& d : climbs) {
    if (d.converged(optimum, margin)) {
      ++converged;
    } else if (d.error.empty() && d.terminus.classification == PointClass::trap_candidate) {
      ++s.trap_candidates;
    }
    if (d.first_terminus.classification == PointClass::saddle ||
        d.terminus.classification == PointClass::saddle) {
      ++s.saddle_encounters;
    }
    if (d.escalation) ++s.escalations;
    for (const auto* c : {d.climb ? &*d.climb : nullptr, d.escalation ? &*d.escalation : nullptr}) {
      if (c) s.monotonicity_violations += monotonicity_violations(c->trace);
    }
    iterations.push_back(d.iterations());
    s.total_function_evaluations += d.function_evaluations();
    s.total_gradient_evaluations += d.gradient_evaluations();
  }
  const auto n = static_cast<double>(climbs.size());
  s.converged_fraction = converged / n;
  s.trapped_fraction = s.trap_candidates / n;
  s.other_fraction = (n - converged - s.trap_candidates) / n;
  std::sort(iterations.begin(), iterations.end());
  if (!iterations.empty()) {
    const std::size_t mid = iterations.size() / 2;
    s.median_iterations = iterations.size() % 2 == 1
                              ? iterations[mid]
                              : 0.5 * (iterations[mid - 1] + iterations[mid]);
    s.max_iterations = iterations.back();
  }
  s.climbs = std::move(climbs);
  return s;
}

SurveySummary survey_serial(const Landscape& landscape, const SurveyConfig& cfg) {
  validate(cfg);
  std::vector<ClimbDigest> climbs;
  climbs.reserve(static_cast<std::size_t>(cfg.starts));
  for (int i = 0; i < cfg.starts; ++i) climbs.push_back(run_start(landscape, cfg, i));
  return summarize(std::move(climbs), cfg, landscape.optimum());
}

SurveySummary survey(const Landscape& landscape, const SurveyConfig& cfg, int workers) {
  validate(cfg);
  std::vector<ClimbDigest> climbs(static_cast<std::size_t>(cfg.starts));
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (int i = 0; i < cfg.starts; ++i) {
    climbs[static_cast<std::size_t>(i)] = run_start(landscape, cfg, i);
  }
  return summarize(std::move(climbs), cfg, landscape.optimum());
}

SliceGrid landscape_slice_serial(const Landscape& landscape, const SliceSpec& spec) {
  validate(landscape, spec);
  SliceGrid grid{grid_axis(spec.grid_points, spec.half_width),
                 grid_axis(spec.grid_points, spec.half_width),
                 RMatrix(spec.grid_points, spec.grid_points)};
  for (int i = 0; i < spec.grid_points; ++i)
    for (int j = 0; j < spec.grid_points; ++j)
      grid.values(i, j) = slice_value(landscape, spec, grid.a(i), grid.b(j));
  return grid;
}

SliceGrid landscape_slice(const Landscape& landscape, const SliceSpec& spec, int workers) {
  validate(landscape, spec);
  SliceGrid grid{grid_axis(spec.grid_points, spec.half_width),
                 grid_axis(spec.grid_points, spec.half_width),
                 RMatrix(spec.grid_points, spec.grid_points)};
  const int cells = spec.grid_points * spec.grid_points;
#pragma omp parallel for schedule(static) num_threads(std::max(1, workers))
  for (int cell = 0; cell < cells; ++cell) {
    const int i = cell / spec.grid_points;
    const int j = cell % spec.grid_points;
    grid.values(i, j) = slice_value(landscape, spec, grid.a(i), grid.b(j));
  }
  return grid;
}

}  // namespace ctlscape
