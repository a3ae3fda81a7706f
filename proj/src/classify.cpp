#include <algorithm>
#include <cmath>

#include "ctlscape/climb.hpp"
#include "ctlscape/random.hpp"

namespace ctlscape {

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::global_optimum_level_set:
      return "global-optimum-level-set";
    case PointClass::saddle:
      return "saddle";
    case PointClass::trap_candidate:
      return "trap-candidate";
    case PointClass::minimum:
      return "minimum";
    case PointClass::not_critical:
      return "not-critical";
  }
  return "unknown";
}

HessianExtremes estimate_hessian_extremes(const Landscape& landscape, const PiecewiseControl& w,
                                          const ClassifyThresholds& thresholds) {
  const Index m = w.intervals();
  const double h = thresholds.fd_step;
  int evals = 0;
  const auto hv = [&](const RVector& v) {
    const RVector up = landscape.value_and_gradient(w.with_values(w.values() + h * v)).gradient;
    const RVector down = landscape.value_and_gradient(w.with_values(w.values() - h * v)).gradient;
    evals += 2;
    return RVector((up - down) / (2.0 * h));
  };
  Rng rng = make_rng(thresholds.seed);

  const auto power = [&](double shift) {
    RVector v = random_direction(m, rng);
    double lambda = 0.0;
    for (int it = 0; it < thresholds.power_iterations; ++it) {
      const RVector u = hv(v) - shift * v;
      const double next = v.dot(u);
      const double norm = u.norm();
      const bool settled = std::abs(next - lambda) <= 1e-10 * std::max(1e-12, std::abs(next));
      lambda = next;
      if (norm == 0.0 || settled) break;
      v = u / norm;
    }
    return lambda + shift;
  };

  const double dominant = power(0.0);
  const double opposite = power(dominant);
  double lo = std::min(dominant, opposite);
  double hi = std::max(dominant, opposite);
  for (int p = 0; p < thresholds.probes; ++p) {
    const RVector v = random_direction(m, rng);
    const double rq = v.dot(hv(v));
    lo = std::min(lo, rq);
    hi = std::max(hi, rq);
  }
  return {lo, hi, evals};
}

CriticalPointRecord classify_critical_point(const Landscape& landscape, const PiecewiseControl& w,
                                            const ClassifyThresholds& thresholds) {
  const auto vg = landscape.value_and_gradient(w);
  CriticalPointRecord rec;
  rec.value = vg.value;
  rec.gradient_norm = vg.gradient.norm();
  if (rec.gradient_norm >= thresholds.gradient_tolerance) {
    rec.classification = PointClass::not_critical;
    return rec;
  }
  if (rec.value >= landscape.optimum() - thresholds.optimum_margin) {
    rec.classification = PointClass::global_optimum_level_set;
    return rec;
  }
  const auto ext = estimate_hessian_extremes(landscape, w, thresholds);
  rec.min_eigenvalue = ext.min;
  rec.max_eigenvalue = ext.max;
  const double noise = thresholds.hessian_noise;
  if (ext.min < -noise && ext.max > noise) {
    rec.classification = PointClass::saddle;
  } else if (ext.max < noise) {
    rec.classification = PointClass::trap_candidate;
  } else {
    rec.classification = PointClass::minimum;
  }
  return rec;
}

}  // namespace ctlscape
