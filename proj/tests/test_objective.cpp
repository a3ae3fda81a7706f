#include <gtest/gtest.h>

#include <cmath>

#include "ctlscape/objective.hpp"
#include "ctlscape/random.hpp"
#include "oracles.hpp"

using namespace ctlscape;

namespace {

const Complex I(0.0, 1.0);

PiecewiseControl random_control(Index m, double horizon, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return PiecewiseControl(uniform_box(m, 1.0, rng), horizon);
}

double relative_error(const RVector& a, const RVector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

TEST(GateFidelity, Examples) {
  const CMatrix g = pauli::x();
  EXPECT_DOUBLE_EQ(gate_fidelity(g, g).normalized, 1.0);
  EXPECT_DOUBLE_EQ(gate_fidelity(g, g).raw, 4.0);
  EXPECT_NEAR(gate_fidelity(pauli::z(), g).normalized, 0.0, 1e-15);
  EXPECT_NEAR(gate_fidelity(std::exp(I * 0.3) * g, g).normalized, 1.0, 1e-15);
}

TEST(GateFidelity, BoundedOnRandomUnitaries) {
  Rng rng = make_rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto f = gate_fidelity(haar_unitary(3, rng), haar_unitary(3, rng));
    EXPECT_GE(f.normalized, 0.0);
    EXPECT_LE(f.normalized, 1.0 + 1e-14);
  }
}

TEST(QuadraticCost, Examples) {
  EXPECT_DOUBLE_EQ(quadratic_cost(RVector::Ones(3), RVector::Ones(3)), 0.0);
  EXPECT_DOUBLE_EQ(quadratic_cost(RVector::Zero(2), RVector::Constant(2, 2.0)), 8.0);
  EXPECT_THROW(quadratic_cost(RVector::Zero(2), RVector::Zero(3)), InvalidArgument);
}

TEST(Objective, CompatibilityChecks) {
  const QuantumControlSystem q(pauli::z(), pauli::x(), 1.0);
  const auto lti = sample_random_lti(3, 1);
  EXPECT_THROW(require_compatible(q, Objective::quadratic_cost(RVector::Zero(2))), InvalidArgument);
  EXPECT_THROW(require_compatible(lti, Objective::gate_fidelity(pauli::x())), InvalidArgument);
  EXPECT_THROW(require_compatible(lti, Objective::quadratic_cost(RVector::Zero(2))), InvalidArgument);
  EXPECT_THROW(require_compatible(q, Objective::gate_fidelity(CMatrix::Identity(3, 3))),
               InvalidArgument);
  EXPECT_NO_THROW(require_compatible(lti, Objective::quadratic_cost(RVector::Zero(3))));
}

TEST(Landscape, ValueConventions) {
  const QuantumControlSystem q(pauli::z(), pauli::x(), 1.0);
  const Landscape fq(q, Objective::gate_fidelity(pauli::x()));
  EXPECT_DOUBLE_EQ(fq.optimum(), 1.0);
  const auto lti = sample_random_lti(2, 3);
  const Landscape fl(lti, Objective::quadratic_cost(RVector::Zero(2)));
  EXPECT_DOUBLE_EQ(fl.optimum(), 0.0);
  const auto w = PiecewiseControl::constant(4, 1.0, 0.3);
  const RVector x = propagate_lti_closed_form(lti, w);
  EXPECT_DOUBLE_EQ(fl.value(w), -x.squaredNorm());
}

TEST(Gradient, QuantumMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const Index n = 2 + static_cast<Index>(s % 3);
    const auto sys = sample_random_quantum_system(n, 300 + s, 1.5);
    Rng rng = make_rng(400 + s);
    const Landscape f(sys, Objective::gate_fidelity(haar_unitary(n, rng)));
    const auto w = random_control(32, 1.5, 500 + s);
    EXPECT_LT(relative_error(f.value_and_gradient(w).gradient, oracle::fd_gradient(f, w)), 1e-6);
  }
}

TEST(Gradient, LtiMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const auto sys = sample_random_lti(1 + static_cast<Index>(s % 5), 600 + s);
    Rng rng = make_rng(700 + s);
    const Landscape f(sys, Objective::quadratic_cost(gaussian_vector(sys.dimension(), rng)));
    const auto w = random_control(16, sys.horizon(), 800 + s);
    EXPECT_LT(relative_error(f.value_and_gradient(w).gradient, oracle::fd_gradient(f, w)), 1e-6);
  }
}

TEST(Gradient, NonlinearFiniteDifferencesAreConsistent) {
  const auto sys = lti_cubic(sample_random_lti(3, 9), 0.05);
  const Landscape f(sys, Objective::quadratic_cost(RVector::Zero(3)), EvaluationOptions{16});
  const auto w = random_control(8, 1.0, 10);
  EXPECT_LT(relative_error(f.value_and_gradient(w).gradient, oracle::fd_gradient(f, w, 1e-4)), 1e-5);
}

TEST(Gradient, ZeroAtGlobalOptimum) {
  const auto sys = sample_random_quantum_system(3, 12, 2.0);
  const auto w = random_control(18, 2.0, 13);
  const CMatrix u = propagate_quantum(sys, w).final;
  const Landscape f(sys, Objective::gate_fidelity(u));
  const auto vg = f.value_and_gradient(w);
  EXPECT_NEAR(vg.value, 1.0, 1e-12);
  EXPECT_LT(vg.gradient.norm(), 1e-8);
}

TEST(Gradient, GlobalPhaseInvariance) {
  const auto sys = sample_random_quantum_system(3, 14, 2.0);
  Rng rng = make_rng(15);
  const CMatrix g = haar_unitary(3, rng);
  const Landscape f(sys, Objective::gate_fidelity(g));
  const Landscape fp(sys, Objective::gate_fidelity(std::exp(I * 1.234) * g));
  const auto w = random_control(18, 2.0, 16);
  const auto a = f.value_and_gradient(w);
  const auto b = fp.value_and_gradient(w);
  EXPECT_NEAR(a.value, b.value, 1e-12);
  EXPECT_LT((a.gradient - b.gradient).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Gradient, CommutingGeneratorsGiveFlatLandscape) {
  const QuantumControlSystem sys(pauli::z(), pauli::z(), 1.0);
  const Landscape f(sys, Objective::gate_fidelity(pauli::x()));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto vg = f.value_and_gradient(random_control(8, 1.0, s));
    EXPECT_NEAR(vg.value, 0.0, 1e-15);
    EXPECT_LT(vg.gradient.norm(), 1e-15);
  }
}

TEST(EndpointGradient, VanishesAtKinematicCriticalPoints) {
  Rng rng = make_rng(17);
  const CMatrix u = haar_unitary(3, rng);
  RMatrix d = RMatrix::Identity(3, 3);
  d(2, 2) = -1.0;
  const CMatrix g = u * d.cast<Complex>();
  const Objective obj = Objective::gate_fidelity(g);
  EXPECT_LT(endpoint_gradient(obj, realify(u)).norm(), 1e-14);
  EXPECT_GT(endpoint_gradient(obj, realify(haar_unitary(3, rng))).norm(), 1e-6);
}
