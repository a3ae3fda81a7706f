#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ctlscape/objective.hpp"

namespace ctlscape {

enum class Termination { converged_gradient, hit_iteration_cap, step_underflow };

std::string_view to_string(Termination t);

/// Settings for monotone gradient ascent with a backtracking (Armijo) line
/// search. The first trial step of each iteration is the short Barzilai-Borwein
/// estimate when enabled, otherwise the last accepted step grown by
/// 1 / contraction; trial points are projected onto the fluence ball when a
/// bound is set.
struct ClimbConfig {
  int max_iterations = 2000;
  double gradient_tolerance = 1e-8;
  double initial_step = 1.0;
  double contraction = 0.5;
  double sufficient_increase = 1e-4;
  std::optional<double> fluence_bound;
  bool barzilai_borwein = true;
};

void validate(const ClimbConfig& cfg);

struct ClimbResult {
  PiecewiseControl final_control;
  std::vector<double> trace;  // F after each accepted step, starting with F(w0)
  int iterations = 0;
  int function_evaluations = 0;
  int gradient_evaluations = 0;
  Termination termination = Termination::hit_iteration_cap;
  double final_gradient_norm = 0.0;  // projected-gradient norm under a fluence bound
};

/// Euclidean projection onto {w : fluence(w) <= q_max}: radial rescaling.
PiecewiseControl project_fluence(const PiecewiseControl& w, double q_max);

ClimbResult gradient_ascent(const Landscape& landscape, const PiecewiseControl& w0,
                            const ClimbConfig& cfg);

/// Count of strict decreases in a trace; zero for every valid climb.
int monotonicity_violations(const std::vector<double>& trace);

enum class PointClass { global_optimum_level_set, saddle, trap_candidate, minimum, not_critical };

std::string_view to_string(PointClass c);

struct ClassifyThresholds {
  double gradient_tolerance = 1e-8;
  double optimum_margin = 1e-3;
  double hessian_noise = 1e-7;
  double fd_step = 1e-4;
  int power_iterations = 100;
  int probes = 8;
  std::uint64_t seed = 0;
};

struct CriticalPointRecord {
  double value = 0.0;
  double gradient_norm = 0.0;
  std::optional<double> min_eigenvalue;
  std::optional<double> max_eigenvalue;
  PointClass classification = PointClass::not_critical;
};

struct HessianExtremes {
  double min;
  double max;
  int gradient_evaluations;
};

/// Matrix-free estimates of the extreme Hessian eigenvalues of F at w, from
/// central differences of the gradient: power iteration for the dominant
/// eigenvalue, shifted power iteration for the opposite end, and Rayleigh
/// quotients along random probe directions.
HessianExtremes estimate_hessian_extremes(const Landscape& landscape, const PiecewiseControl& w,
                                          const ClassifyThresholds& thresholds);

/// Classification of w as a landscape point:
///   not_critical              |grad F| >= gradient_tolerance
///   global_optimum_level_set  F within optimum_margin of the known optimum
///   saddle                    Hessian extremes of strictly mixed sign
///   trap_candidate            largest Hessian eigenvalue below +noise
///   minimum                   ascent curvature only (no descent directions)
CriticalPointRecord classify_critical_point(const Landscape& landscape, const PiecewiseControl& w,
                                            const ClassifyThresholds& thresholds);

}  // namespace ctlscape
