#include "ctlscape/climb.hpp"

#include <cmath>
#include <limits>

namespace ctlscape {

namespace {

constexpr int kMaxBacktracks = 80;
constexpr double kMaxStep = 1e8;

PiecewiseControl maybe_project(const PiecewiseControl& w, const std::optional<double>& bound) {
  return bound ? project_fluence(w, *bound) : w;
}

// Stationarity measure: |grad| unconstrained, |P(w + g) - w| on the fluence ball.
double stationarity(const PiecewiseControl& w, const RVector& g,
                    const std::optional<double>& bound) {
  if (!bound) return g.norm();
  const RVector moved = project_fluence(w.with_values(w.values() + g), *bound).values();
  return (moved - w.values()).norm();
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::converged_gradient:
      return "converged-gradient";
    case Termination::hit_iteration_cap:
      return "hit-iteration-cap";
    case Termination::step_underflow:
      return "step-underflow";
  }
  return "unknown";
}

void validate(const ClimbConfig& cfg) {
  if (cfg.max_iterations < 0) throw InvalidArgument("max_iterations must be non-negative");
  if (!(cfg.gradient_tolerance > 0.0)) throw InvalidArgument("gradient_tolerance must be positive");
  if (!(cfg.initial_step > 0.0)) throw InvalidArgument("initial_step must be positive");
  if (!(cfg.contraction > 0.0 && cfg.contraction < 1.0)) {
    throw InvalidArgument("contraction must lie in (0, 1)");
  }
  if (!(cfg.sufficient_increase > 0.0 && cfg.sufficient_increase < 1.0)) {
    throw InvalidArgument("sufficient_increase must lie in (0, 1)");
  }
  if (cfg.fluence_bound && !(*cfg.fluence_bound > 0.0)) {
    throw InvalidArgument("fluence bound must be positive");
  }
}

PiecewiseControl project_fluence(const PiecewiseControl& w, double q_max) {
  if (!(q_max > 0.0)) throw InvalidArgument("fluence bound must be positive");
  const double q = fluence(w);
  if (q <= q_max) return w;
  return w.with_values(w.values() * std::sqrt(q_max / q));
}

int monotonicity_violations(const std::vector<double>& trace) {
  int count = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1]) ++count;
  }
  return count;
}

ClimbResult gradient_ascent(const Landscape& landscape, const PiecewiseControl& w0,
                            const ClimbConfig& cfg) {
  validate(cfg);
  if (std::abs(w0.horizon() - landscape.horizon()) > 1e-12 * std::max(1.0, landscape.horizon())) {
    throw InvalidArgument("initial control horizon does not match the system");
  }

  ClimbResult out{maybe_project(w0, cfg.fluence_bound), {}, 0, 0, 0,
                  Termination::hit_iteration_cap, 0.0};
  PiecewiseControl w = out.final_control;
  ValueAndGradient current = landscape.value_and_gradient(w);
  ++out.function_evaluations;
  ++out.gradient_evaluations;
  out.trace.push_back(current.value);

  double step = cfg.initial_step;
  for (;;) {
    const double stat = stationarity(w, current.gradient, cfg.fluence_bound);
    out.final_gradient_norm = stat;
    if (stat < cfg.gradient_tolerance) {
      out.termination = Termination::converged_gradient;
      break;
    }
    if (out.iterations >= cfg.max_iterations) {
      out.termination = Termination::hit_iteration_cap;
      break;
    }

    bool accepted = false;
    double trial_value = 0.0;
    RVector displacement;
    PiecewiseControl trial = w;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial = maybe_project(w.with_values(w.values() + step * current.gradient), cfg.fluence_bound);
      displacement = trial.values() - w.values();
      if (displacement.norm() <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     (1.0 + w.values().norm())) {
        break;
      }
      trial_value = landscape.value(trial);
      ++out.function_evaluations;
      const double predicted = current.gradient.dot(displacement);
      if (trial_value >= current.value + cfg.sufficient_increase * predicted &&
          trial_value >= current.value) {
        accepted = true;
        break;
      }
      step *= cfg.contraction;
    }
    if (!accepted) {
      out.termination = Termination::step_underflow;
      break;
    }

    ValueAndGradient next = landscape.value_and_gradient(trial);
    ++out.function_evaluations;
    ++out.gradient_evaluations;
    next.value = trial_value;

    double proposal = step / cfg.contraction;
    if (cfg.barzilai_borwein) {
      const RVector y = next.gradient - current.gradient;
      const double sy = displacement.dot(y);
      // Ascent on a locally concave F gives s.y < 0. The short form s.y / y.y
      // is accepted far more often under the monotone rule than s.s / s.y.
      if (sy < 0.0) proposal = -sy / y.squaredNorm();
    }
    step = std::min(kMaxStep, proposal);

    w = std::move(trial);
    current = std::move(next);
    out.trace.push_back(current.value);
    ++out.iterations;
  }
  out.final_control = w;
  return out;
}

}  // namespace ctlscape
