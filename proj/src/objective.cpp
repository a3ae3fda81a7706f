#include "ctlscape/objective.hpp"

#include <cmath>

namespace ctlscape {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double central_difference_step(double w) { return 1e-6 * (1.0 + std::abs(w)); }

// Central differences of F over the control amplitudes.
RVector finite_difference_gradient(const ControlSystem& sys, const Objective& obj,
                                   const PiecewiseControl& w, const EvaluationOptions& opts) {
  RVector grad(w.intervals());
  RVector probe = w.values();
  for (Index k = 0; k < w.intervals(); ++k) {
    const double h = central_difference_step(w[k]);
    probe(k) = w[k] + h;
    const double up = objective_value(sys, obj, w.with_values(probe), opts);
    probe(k) = w[k] - h;
    const double down = objective_value(sys, obj, w.with_values(probe), opts);
    probe(k) = w[k];
    grad(k) = (up - down) / (2.0 * h);
  }
  return grad;
}

CMatrix unrealify(const RVector& v) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()) / 2.0)));
  if (2 * n * n != v.size()) throw InvalidArgument("endpoint is not a realified square matrix");
  CMatrix m(n, n);
  m.real() = v.head(n * n).reshaped(n, n);
  m.imag() = v.tail(n * n).reshaped(n, n);
  return m;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  return kind == ObjectiveKind::gate_fidelity ? "gate_fidelity" : "quadratic_cost";
}

Objective Objective::gate_fidelity(CMatrix gate) {
  return Objective(ObjectiveKind::gate_fidelity, Goal::gate(std::move(gate)));
}

Objective Objective::quadratic_cost(RVector target) {
  return Objective(ObjectiveKind::quadratic_cost, Goal::state(std::move(target)));
}

GateFidelity gate_fidelity(const CMatrix& u, const CMatrix& g) {
  if (u.rows() != g.rows() || u.cols() != g.cols()) {
    throw InvalidArgument("gate fidelity needs matching dimensions");
  }
  const double raw = std::norm((g.adjoint() * u).trace());
  const auto n = static_cast<double>(g.rows());
  return {raw, raw / (n * n)};
}

double quadratic_cost(const RVector& x, const RVector& target) {
  if (x.size() != target.size()) throw InvalidArgument("quadratic cost needs equal lengths");
  return (x - target).squaredNorm();
}

void require_compatible(const ControlSystem& sys, const Objective& obj) {
  std::visit(Overloaded{
                 [&](const QuantumControlSystem& q) {
                   if (obj.kind() != ObjectiveKind::gate_fidelity) {
                     throw InvalidArgument("quantum systems take the gate-fidelity objective");
                   }
                   if (obj.goal().gate_matrix().rows() != q.levels()) {
                     throw InvalidArgument("goal gate dimension does not match the system");
                   }
                 },
                 [&](const auto& s) {
                   if (obj.kind() != ObjectiveKind::quadratic_cost) {
                     throw InvalidArgument("gate fidelity requires a quantum system");
                   }
                   if (obj.goal().target_state().size() != s.dimension()) {
                     throw InvalidArgument("target state dimension does not match the system");
                   }
                 }},
             sys);
}

RVector endpoint_state(const ControlSystem& sys, const PiecewiseControl& w,
                       const EvaluationOptions& opts) {
  return std::visit(
      Overloaded{
          [&](const QuantumControlSystem& q) { return realify(propagate_quantum(q, w).final); },
          [&](const LtiControlSystem& l) { return propagate_lti_closed_form(l, w); },
          [&](const NonlinearControlSystem& n) { return integrate_ode(n, w, opts.ode_substeps); }},
      sys);
}

double objective_value(const ControlSystem& sys, const Objective& obj, const PiecewiseControl& w,
                       const EvaluationOptions& opts) {
  if (const auto* q = std::get_if<QuantumControlSystem>(&sys)) {
    return gate_fidelity(propagate_quantum(*q, w).final, obj.goal().gate_matrix()).normalized;
  }
  return -quadratic_cost(endpoint_state(sys, w, opts), obj.goal().target_state());
}

ValueAndGradient value_and_gradient(const ControlSystem& sys, const Objective& obj,
                                    const PiecewiseControl& w, const EvaluationOptions& opts) {
  return std::visit(
      Overloaded{
          [&](const QuantumControlSystem& q) {
            const CMatrix& g = obj.goal().gate_matrix();
            const auto prop = propagate_quantum(q, w);
            const Complex overlap = (g.adjoint() * prop.final).trace();
            const auto n2 = static_cast<double>(q.levels() * q.levels());
            RVector grad(w.intervals());
            for (Index k = 0; k < w.intervals(); ++k) {
              const CMatrix d = endpoint_derivative(q, prop, k, w.dt());
              grad(k) = 2.0 * (std::conj(overlap) * (g.adjoint() * d).trace()).real() / n2;
            }
            return ValueAndGradient{std::norm(overlap) / n2, std::move(grad)};
          },
          [&](const LtiControlSystem& l) {
            const RVector residual =
                propagate_lti_closed_form(l, w) - obj.goal().target_state();
            const RMatrix columns = lti_input_columns(l, w.intervals());
            return ValueAndGradient{-residual.squaredNorm(),
                                    -2.0 * columns.transpose() * residual};
          },
          [&](const NonlinearControlSystem&) {
            return ValueAndGradient{objective_value(sys, obj, w, opts),
                                    finite_difference_gradient(sys, obj, w, opts)};
          }},
      sys);
}

RVector objective_gradient(const ControlSystem& sys, const Objective& obj,
                           const PiecewiseControl& w, const EvaluationOptions& opts) {
  return value_and_gradient(sys, obj, w, opts).gradient;
}

RVector endpoint_gradient(const Objective& obj, const RVector& endpoint) {
  if (obj.kind() == ObjectiveKind::quadratic_cost) {
    const RVector& target = obj.goal().target_state();
    if (endpoint.size() != target.size()) throw InvalidArgument("endpoint dimension mismatch");
    return -2.0 * (endpoint - target);
  }
  const CMatrix& g = obj.goal().gate_matrix();
  const CMatrix u = unrealify(endpoint);
  if (u.rows() != g.rows()) throw InvalidArgument("endpoint dimension mismatch");
  const auto n2 = static_cast<double>(g.rows() * g.rows());
  // Re Tr(ambient^dagger dU) = dJ for J = |Tr(G^dagger U)|^2 / n^2.
  const CMatrix ambient = (2.0 / n2) * (g.adjoint() * u).trace() * g;
  const CMatrix x = u.adjoint() * ambient;
  return realify(u * (0.5 * (x - x.adjoint())));
}

Landscape::Landscape(ControlSystem system, Objective objective, EvaluationOptions options)
    : system_(std::move(system)), objective_(std::move(objective)), options_(options) {
  require_compatible(system_, objective_);
}

double Landscape::value(const PiecewiseControl& w) const {
  return objective_value(system_, objective_, w, options_);
}

ValueAndGradient Landscape::value_and_gradient(const PiecewiseControl& w) const {
  return ctlscape::value_and_gradient(system_, objective_, w, options_);
}

}  // namespace ctlscape
