#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctlscape/linalg.hpp"

namespace ctlscape {

/// A control w(t) held constant on each of M equal subintervals of [0, T].
class PiecewiseControl {
 public:
  PiecewiseControl(RVector values, double horizon);

  static PiecewiseControl constant(Index intervals, double horizon, double value);

  const RVector& values() const { return values_; }
  double operator[](Index k) const { return values_(k); }
  Index intervals() const { return values_.size(); }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / static_cast<double>(values_.size()); }

  /// Same horizon, new amplitudes.
  PiecewiseControl with_values(RVector values) const;

 private:
  RVector values_;
  double horizon_;
};

/// Discretized fluence dt * sum_k w_k^2.
double fluence(const PiecewiseControl& w);

/// Closed quantum system under a single dipole-coupled control,
/// H[w] = H0 + w Hc, evolving as dU/dt = i H[w] U on U(n).
class QuantumControlSystem {
 public:
  /// Generators must be Hermitian to within 1e-12 of their norm; the stored
  /// copies are hermitized exactly.
  QuantumControlSystem(CMatrix drift, CMatrix coupling, double horizon);

  const CMatrix& drift() const { return drift_; }
  const CMatrix& coupling() const { return coupling_; }
  Index levels() const { return drift_.rows(); }
  double horizon() const { return horizon_; }

  /// Same generators on a different horizon.
  QuantumControlSystem with_horizon(double horizon) const;

 private:
  CMatrix drift_;
  CMatrix coupling_;
  double horizon_;
};

/// dX/dt = A X + w(t) b, X(0) = x0.
class LtiControlSystem {
 public:
  LtiControlSystem(RMatrix a, RVector b, RVector x0, double horizon);

  const RMatrix& a() const { return a_; }
  const RVector& b() const { return b_; }
  const RVector& x0() const { return x0_; }
  Index dimension() const { return a_.rows(); }
  double horizon() const { return horizon_; }

 private:
  RMatrix a_;
  RVector b_;
  RVector x0_;
  double horizon_;
};

class NonlinearControlSystem;

/// Built-in right-hand sides F(x, w). Each reads the structural data it needs
/// (A, b, coupling matrix, named parameters) from the owning system.
using VectorField = RVector (*)(const NonlinearControlSystem&, const RVector& x, double w);

/// Registry lookup; throws InvalidArgument for unknown names.
VectorField vector_field(std::string_view name);
std::vector<std::string> vector_field_names();

/// dx/dt = F(x, w(t)) with F drawn from the built-in registry:
///   "zero"      F = 0
///   "lti"       F = A x + w b
///   "lti_cubic" F = A x + w b + epsilon * x.^3      (param "epsilon")
///   "bilinear"  F = A x + w B x                      (B = coupling matrix)
class NonlinearControlSystem {
 public:
  NonlinearControlSystem(std::string rhs, RVector x0, double horizon, RMatrix a = {},
                         RVector b = {}, RMatrix coupling = {},
                         std::map<std::string, double> params = {});

  const std::string& rhs() const { return rhs_; }
  const RVector& x0() const { return x0_; }
  Index dimension() const { return x0_.size(); }
  double horizon() const { return horizon_; }
  const RMatrix& a() const { return a_; }
  const RVector& b() const { return b_; }
  const RMatrix& coupling() const { return coupling_; }
  const std::map<std::string, double>& params() const { return params_; }
  double param(const std::string& name) const;

  RVector evaluate(const RVector& x, double w) const { return field_(*this, x, w); }

  NonlinearControlSystem with_param(const std::string& name, double value) const;

 private:
  std::string rhs_;
  RVector x0_;
  double horizon_;
  RMatrix a_;
  RVector b_;
  RMatrix coupling_;
  std::map<std::string, double> params_;
  VectorField field_;
};

NonlinearControlSystem lti_wrapper(const LtiControlSystem& sys);
NonlinearControlSystem lti_cubic(const LtiControlSystem& sys, double epsilon);

using ControlSystem =
    std::variant<QuantumControlSystem, LtiControlSystem, NonlinearControlSystem>;

double horizon_of(const ControlSystem& sys);

/// Either a unitary goal gate (quantum) or a target state (LTI / nonlinear).
class Goal {
 public:
  /// Requires G^dagger G = I within 1e-10.
  static Goal gate(CMatrix g);
  static Goal state(RVector target);

  bool is_gate() const { return is_gate_; }
  const CMatrix& gate_matrix() const;
  const RVector& target_state() const;

 private:
  Goal() = default;
  bool is_gate_ = false;
  CMatrix gate_;
  RVector target_;
};

/// Endpoint and stored boundary propagators of a quantum propagation.
struct QuantumPropagation {
  CMatrix final;
  /// U_0 = I, U_k = E_k U_{k-1}; M + 1 entries.
  std::vector<CMatrix> intermediates;
  /// Spectrum of H0 + w_k Hc for each interval, reused for exact derivatives.
  std::vector<HermitianSpectrum> spectra;
};

QuantumPropagation propagate_quantum(const QuantumControlSystem& sys,
                                     const PiecewiseControl& w);

/// d/dw exp(i dt (H0 + w Hc)) at the interval's spectrum, from the divided
/// differences of exp in that eigenbasis (exact, no finite differencing).
CMatrix interval_derivative(const HermitianSpectrum& spectrum, const CMatrix& coupling,
                            double dt);

/// dU_T / dw_k for interval k (0-based).
CMatrix endpoint_derivative(const QuantumControlSystem& sys, const QuantumPropagation& prop,
                            Index k, double dt);

/// One-interval maps of the LTI system: X_{k} = transition X_{k-1} + w_k input.
struct LtiIntervalMaps {
  RMatrix transition;  // exp(dt A)
  RVector input;       // int_0^dt exp(s A) b ds
};

LtiIntervalMaps lti_interval_maps(const LtiControlSystem& sys, double dt);

/// Column k is the exact response of X(T) to a unit amplitude on interval k:
/// the integral over that interval of exp((T - t) A) b dt.
RMatrix lti_input_columns(const LtiControlSystem& sys, Index intervals);

RVector propagate_lti_closed_form(const LtiControlSystem& sys, const PiecewiseControl& w);

/// State left the overflow guard during integration.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, double norm);
  double time() const { return time_; }

 private:
  double time_;
};

inline constexpr double kDivergenceBound = 1e12;

/// Classical RK4 with `substeps` steps per control interval.
RVector integrate_ode(const NonlinearControlSystem& sys, const PiecewiseControl& w,
                      int substeps);

/// One unit of time per interval at the default discretization M = 2 n^2.
/// Shorter horizons leave some Gaussian systems short of full reachability;
/// longer ones stretch each piece until large amplitudes alias.
double default_quantum_horizon(Index levels);
inline constexpr double kDefaultLtiHorizon = 1.0;

/// Drift and coupling from the Gaussian Hermitian ensemble; the horizon
/// defaults to default_quantum_horizon(levels).
QuantumControlSystem sample_random_quantum_system(Index levels, std::uint64_t seed);
QuantumControlSystem sample_random_quantum_system(Index levels, std::uint64_t seed,
                                                  double horizon);
LtiControlSystem sample_random_lti(Index dimension, std::uint64_t seed,
                                   double horizon = kDefaultLtiHorizon);

}  // namespace ctlscape
