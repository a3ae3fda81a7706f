#pragma once

#include <string_view>

#include "ctlscape/systems.hpp"

namespace ctlscape {

enum class ObjectiveKind { gate_fidelity, quadratic_cost };

std::string_view to_string(ObjectiveKind kind);

/// Objective on the endpoint. Values are always reported in the maximization
/// convention: normalized gate fidelity in [0, 1], or the negated quadratic
/// cost (optimum 0).
class Objective {
 public:
  static Objective gate_fidelity(CMatrix gate);
  static Objective quadratic_cost(RVector target);

  ObjectiveKind kind() const { return kind_; }
  const Goal& goal() const { return goal_; }

  /// Known global optimum of the maximization-convention value.
  double optimum() const { return kind_ == ObjectiveKind::gate_fidelity ? 1.0 : 0.0; }

 private:
  Objective(ObjectiveKind kind, Goal goal) : kind_(kind), goal_(std::move(goal)) {}
  ObjectiveKind kind_;
  Goal goal_;
};

struct GateFidelity {
  double raw;         // |Tr(G^dagger U)|^2, in [0, n^2]
  double normalized;  // raw / n^2
};

GateFidelity gate_fidelity(const CMatrix& u, const CMatrix& g);

double quadratic_cost(const RVector& x, const RVector& target);

/// Throws InvalidArgument unless the objective suits the system family and
/// dimensions agree.
void require_compatible(const ControlSystem& sys, const Objective& obj);

struct EvaluationOptions {
  int ode_substeps = 8;
};

struct ValueAndGradient {
  double value;
  RVector gradient;
};

/// F(w) = J(x_T(w)) in the maximization convention.
double objective_value(const ControlSystem& sys, const Objective& obj,
                       const PiecewiseControl& w, const EvaluationOptions& opts = {});

/// Exact for quantum and LTI systems (stored intermediates / closed-form
/// input columns); central differences with h = 1e-6 (1 + |w_k|) otherwise.
ValueAndGradient value_and_gradient(const ControlSystem& sys, const Objective& obj,
                                    const PiecewiseControl& w,
                                    const EvaluationOptions& opts = {});

RVector objective_gradient(const ControlSystem& sys, const Objective& obj,
                           const PiecewiseControl& w, const EvaluationOptions& opts = {});

/// Endpoint as a real state vector: X(T), or U_T realified (re then im).
RVector endpoint_state(const ControlSystem& sys, const PiecewiseControl& w,
                       const EvaluationOptions& opts = {});

/// Gradient of J with respect to the endpoint, in the same real coordinates as
/// endpoint_state. For gates this is the Riemannian gradient on U(n) (the
/// ambient gradient projected onto the tangent space U * u(n)), so it vanishes
/// wherever U_T is a critical point of J.
RVector endpoint_gradient(const Objective& obj, const RVector& endpoint);

/// System, objective and evaluation settings bundled as a landscape F(w).
class Landscape {
 public:
  Landscape(ControlSystem system, Objective objective, EvaluationOptions options = {});

  const ControlSystem& system() const { return system_; }
  const Objective& objective() const { return objective_; }
  const EvaluationOptions& options() const { return options_; }
  double horizon() const { return horizon_of(system_); }
  double optimum() const { return objective_.optimum(); }

  double value(const PiecewiseControl& w) const;
  ValueAndGradient value_and_gradient(const PiecewiseControl& w) const;

 private:
  ControlSystem system_;
  Objective objective_;
  EvaluationOptions options_;
};

}  // namespace ctlscape
