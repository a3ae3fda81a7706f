#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctlscape/climb.hpp"

namespace ctlscape {

struct SurveyConfig {
  Index intervals = 32;
  int starts = 50;
  double amplitude = 1.0;  // initial controls uniform in [-amplitude, amplitude]
  ClimbConfig climb;
  ClassifyThresholds thresholds;
  int escalation_factor = 10;    // iteration budget multiplier for re-climbs
  double escalation_kick = 1e-3; // perturbation applied before re-climbing a critical terminus
  std::uint64_t seed = 0;
};

/// One start of a survey. Starts whose first climb ends below the optimum
/// margin are re-climbed from their terminus with an escalated budget and a
/// fresh line search; `terminus` classifies wherever the last climb ended.
struct ClimbDigest {
  int start = 0;
  std::uint64_t seed = 0;
  std::optional<ClimbResult> climb;
  std::optional<ClimbResult> escalation;
  CriticalPointRecord first_terminus;
  CriticalPointRecord terminus;
  std::string error;  // non-empty when the climb threw; the start counts as "other"

  const ClimbResult* last_climb() const;
  bool converged(double optimum, double margin) const;
  int iterations() const;
  int function_evaluations() const;
  int gradient_evaluations() const;
};

struct SurveySummary {
  std::vector<ClimbDigest> climbs;
  double trapped_fraction = 0.0;
  double converged_fraction = 0.0;
  double other_fraction = 0.0;
  int trap_candidates = 0;
  int saddle_encounters = 0;
  int escalations = 0;
  int monotonicity_violations = 0;
  double median_iterations = 0.0;
  int max_iterations = 0;
  long long total_function_evaluations = 0;
  long long total_gradient_evaluations = 0;
  std::uint64_t seed = 0;
};

/// Initial control of survey start `index`: uniform box draw seeded by
/// derive_seed(seed, index).
PiecewiseControl initial_control(const Landscape& landscape, const SurveyConfig& cfg, int index);

/// Climb, classify and (if needed) escalate a single start. Pure function of
/// (landscape, cfg, index); climb failures are captured in the digest.
ClimbDigest run_start(const Landscape& landscape, const SurveyConfig& cfg, int index);

SurveySummary summarize(std::vector<ClimbDigest> climbs, const SurveyConfig& cfg,
                        double optimum);

/// Multi-start census. The OpenMP version spreads starts over `workers`
/// threads and returns a result bitwise identical to the serial reference.
SurveySummary survey(const Landscape& landscape, const SurveyConfig& cfg, int workers = 1);
SurveySummary survey_serial(const Landscape& landscape, const SurveyConfig& cfg);

struct SliceSpec {
  RVector center;
  RVector direction1;
  RVector direction2;
  double half_width = 1.0;
  int grid_points = 21;
};

/// values(i, j) = F(center + a_i dir1 + b_j dir2), a and b spaced evenly on
/// [-half_width, half_width] (a single point at 0 when grid_points == 1).
struct SliceGrid {
  RVector a;
  RVector b;
  RMatrix values;
};

SliceGrid landscape_slice(const Landscape& landscape, const SliceSpec& spec, int workers = 1);
SliceGrid landscape_slice_serial(const Landscape& landscape, const SliceSpec& spec);

}  // namespace ctlscape
