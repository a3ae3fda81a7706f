#include <gtest/gtest.h>

#include "ctlscape/random.hpp"
#include "ctlscape/serialize.hpp"
#include "ctlscape/survey.hpp"

using namespace ctlscape;

namespace {

Landscape qubit_landscape() {
  const QuantumControlSystem sys(pauli::z(), pauli::x(), 2.0);
  return Landscape(sys, Objective::gate_fidelity(Complex(0.0, 1.0) * pauli::x()));
}

SurveyConfig small_config(Index m, int starts) {
  SurveyConfig cfg;
  cfg.intervals = m;
  cfg.starts = starts;
  cfg.seed = 77;
  return cfg;
}

std::string dump(const SurveySummary& s, double optimum, double margin) {
  Json j = summary_to_json(s);
  for (const auto& d : s.climbs) j["climbs"].push_back(to_json(d, optimum, margin));
  return j.dump();
}

}  // namespace

TEST(Survey, ParallelMatchesSerialBitwise) {
  const auto f = qubit_landscape();
  const auto cfg = small_config(16, 12);
  const auto a = survey(f, cfg, 4);
  const auto b = survey_serial(f, cfg);
  EXPECT_EQ(dump(a, 1.0, 1e-3), dump(b, 1.0, 1e-3));
}

TEST(Survey, ReproducibleAndSeedSensitive) {
  const auto f = qubit_landscape();
  auto cfg = small_config(16, 4);
  const auto a = survey(f, cfg, 2);
  const auto b = survey(f, cfg, 2);
  EXPECT_EQ(dump(a, 1.0, 1e-3), dump(b, 1.0, 1e-3));
  const RVector first = initial_control(f, cfg, 0).values();
  cfg.seed = 78;
  EXPECT_NE(initial_control(f, cfg, 0).values(), first);
  EXPECT_NE(dump(survey(f, cfg, 2), 1.0, 1e-3), dump(a, 1.0, 1e-3));
}

TEST(Survey, StartsAreIndependentOfCount) {
  const auto f = qubit_landscape();
  const auto few = survey(f, small_config(16, 2), 1);
  const auto many = survey(f, small_config(16, 5), 1);
  EXPECT_EQ(few.climbs[1].climb->trace, many.climbs[1].climb->trace);
  EXPECT_EQ(run_start(f, small_config(16, 5), 1).climb->trace, few.climbs[1].climb->trace);
}

TEST(Survey, FractionsPartitionTheStarts) {
  const auto sys = sample_random_quantum_system(2, 3);
  Rng rng = make_rng(4);
  const Landscape f(sys, Objective::gate_fidelity(haar_unitary(2, rng)));
  const auto s = survey(f, small_config(8, 10), 2);
  EXPECT_NEAR(s.converged_fraction + s.trapped_fraction + s.other_fraction, 1.0, 1e-15);
  EXPECT_EQ(s.monotonicity_violations, 0);
  EXPECT_EQ(s.climbs.size(), 10U);
  EXPECT_GE(s.max_iterations, s.median_iterations);
}

TEST(Survey, LtiLandscapeIsTrapFree) {
  const auto sys = sample_random_lti(3, 5);
  Rng rng = make_rng(6);
  const Landscape f(sys, Objective::quadratic_cost(gaussian_vector(3, rng)));
  const auto s = survey(f, small_config(16, 10), 2);
  EXPECT_EQ(s.converged_fraction, 1.0);
  EXPECT_EQ(s.saddle_encounters, 0);
  EXPECT_EQ(s.trap_candidates, 0);
  for (const auto& d : s.climbs) EXPECT_GT(d.terminus.value, -1e-8);
}

TEST(Survey, CommutingGeneratorsNeverConverge) {
  const QuantumControlSystem sys(pauli::z(), pauli::z(), 1.0);
  const Landscape f(sys, Objective::gate_fidelity(pauli::x()));
  const auto s = survey(f, small_config(8, 5), 1);
  EXPECT_EQ(s.converged_fraction, 0.0);
  for (const auto& d : s.climbs) {
    for (double v : d.climb->trace) EXPECT_EQ(v, d.climb->trace.front());
  }
}

TEST(Survey, EscalationFollowsShortfall) {
  const auto f = qubit_landscape();
  auto cfg = small_config(16, 3);
  cfg.climb.max_iterations = 1;
  const auto s = survey(f, cfg, 1);
  for (const auto& d : s.climbs) {
    EXPECT_EQ(d.escalation.has_value(), d.first_terminus.value < 1.0 - 1e-3);
    if (d.escalation) {
      EXPECT_EQ(d.escalation->final_control.values().size(), 16);
      EXPECT_EQ(d.last_climb(), &*d.escalation);
    }
  }
}

TEST(Survey, RejectsBadConfig) {
  const auto f = qubit_landscape();
  auto cfg = small_config(16, 0);
  EXPECT_THROW(survey(f, cfg), InvalidArgument);
  cfg = small_config(0, 3);
  EXPECT_THROW(survey(f, cfg), InvalidArgument);
}

TEST(Slice, SinglePointIsTheCenter) {
  const auto f = qubit_landscape();
  Rng rng = make_rng(1);
  SliceSpec spec{uniform_box(8, 1.0, rng), random_direction(8, rng), random_direction(8, rng)};
  spec.grid_points = 1;
  const auto g = landscape_slice(f, spec);
  ASSERT_EQ(g.values.rows(), 1);
  EXPECT_EQ(g.a(0), 0.0);
  EXPECT_EQ(g.values(0, 0), f.value(PiecewiseControl(spec.center, 2.0)));
}

TEST(Slice, ValuesMatchDirectEvaluation) {
  const auto f = qubit_landscape();
  Rng rng = make_rng(2);
  SliceSpec spec{uniform_box(8, 1.0, rng), random_direction(8, rng), random_direction(8, rng)};
  spec.grid_points = 5;
  spec.half_width = 0.5;
  const auto g = landscape_slice(f, spec, 3);
  EXPECT_DOUBLE_EQ(g.a(0), -0.5);
  EXPECT_DOUBLE_EQ(g.a(4), 0.5);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      const RVector w = spec.center + g.a(i) * spec.direction1 + g.b(j) * spec.direction2;
      EXPECT_EQ(g.values(i, j), f.value(PiecewiseControl(w, 2.0)));
    }
  }
}

TEST(Slice, OptimumCenterIsTheMaximum) {
  const auto sys = sample_random_quantum_system(2, 8);
  Rng rng = make_rng(9);
  const RVector center = uniform_box(8, 1.0, rng);
  const Landscape f(sys,
                    Objective::gate_fidelity(propagate_quantum(sys, PiecewiseControl(center, sys.horizon())).final));
  SliceSpec spec{center, random_direction(8, rng), random_direction(8, rng)};
  spec.grid_points = 7;
  const auto g = landscape_slice(f, spec, 2);
  EXPECT_NEAR(g.values(3, 3), 1.0, 1e-12);
  EXPECT_NEAR(g.values.maxCoeff(), g.values(3, 3), 1e-15);
}

TEST(Slice, ParallelMatchesSerial) {
  const auto f = qubit_landscape();
  Rng rng = make_rng(3);
  SliceSpec spec{uniform_box(8, 1.0, rng), random_direction(8, rng), random_direction(8, rng)};
  spec.grid_points = 9;
  EXPECT_EQ(landscape_slice(f, spec, 4).values, landscape_slice_serial(f, spec).values);
}

TEST(Slice, RejectsDependentDirections) {
  const auto f = qubit_landscape();
  Rng rng = make_rng(4);
  const RVector d = random_direction(8, rng);
  SliceSpec spec{RVector::Zero(8), d, -2.0 * d};
  EXPECT_THROW(landscape_slice(f, spec), InvalidArgument);
  spec.direction2 = random_direction(7, rng);
  EXPECT_THROW(landscape_slice(f, spec), InvalidArgument);
}
