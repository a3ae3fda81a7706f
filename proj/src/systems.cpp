#include "ctlscape/systems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "ctlscape/random.hpp"

namespace ctlscape {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kUnitaryTolerance = 1e-10;

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

void require_horizon(double horizon) {
  require(std::isfinite(horizon) && horizon > 0.0, "horizon T must be finite and positive");
}

void require_matching_horizon(double system, const PiecewiseControl& w) {
  const double tol = 1e-12 * std::max(1.0, std::abs(system));
  if (std::abs(system - w.horizon()) > tol) {
    std::ostringstream msg;
    msg << "control horizon " << w.horizon() << " does not match system horizon " << system;
    throw InvalidArgument(msg.str());
  }
}

RVector zero_field(const NonlinearControlSystem& sys, const RVector&, double) {
  return RVector::Zero(sys.dimension());
}

RVector lti_field(const NonlinearControlSystem& sys, const RVector& x, double w) {
  return sys.a() * x + w * sys.b();
}

RVector lti_cubic_field(const NonlinearControlSystem& sys, const RVector& x, double w) {
  return sys.a() * x + w * sys.b() + sys.param("epsilon") * x.array().cube().matrix();
}

RVector bilinear_field(const NonlinearControlSystem& sys, const RVector& x, double w) {
  return sys.a() * x + w * (sys.coupling() * x);
}

struct FieldEntry {
  std::string_view name;
  VectorField field;
};

constexpr std::array<FieldEntry, 4> kFields{{
    {"zero", &zero_field},
    {"lti", &lti_field},
    {"lti_cubic", &lti_cubic_field},
    {"bilinear", &bilinear_field},
}};

}  // namespace

PiecewiseControl::PiecewiseControl(RVector values, double horizon)
    : values_(std::move(values)), horizon_(horizon) {
  require(values_.size() >= 1, "a piecewise control needs at least one interval");
  require(values_.allFinite(), "control values must be finite");
  require_horizon(horizon_);
}

PiecewiseControl PiecewiseControl::constant(Index intervals, double horizon, double value) {
  return PiecewiseControl(RVector::Constant(intervals, value), horizon);
}

PiecewiseControl PiecewiseControl::with_values(RVector values) const {
  return PiecewiseControl(std::move(values), horizon_);
}

double fluence(const PiecewiseControl& w) { return w.dt() * w.values().squaredNorm(); }

QuantumControlSystem::QuantumControlSystem(CMatrix drift, CMatrix coupling, double horizon)
    : horizon_(horizon) {
  require(drift.rows() >= 2 && drift.rows() == drift.cols(),
          "drift Hamiltonian must be square with at least two levels");
  require(coupling.rows() == drift.rows() && coupling.cols() == drift.cols(),
          "control Hamiltonian must match the drift dimension");
  require(all_finite(drift) && all_finite(coupling), "Hamiltonians must be finite");
  require_horizon(horizon);
  const auto check = [](const CMatrix& h, const char* name) {
    const double scale = std::max(1.0, max_abs(h));
    require(hermitian_deviation(h) < kHermitianTolerance * scale,
            std::string(name) + " is not Hermitian");
  };
  check(drift, "H0");
  check(coupling, "Hc");
  drift_ = hermitize(drift);
  coupling_ = hermitize(coupling);
}

QuantumControlSystem QuantumControlSystem::with_horizon(double horizon) const {
  return QuantumControlSystem(drift_, coupling_, horizon);
}

LtiControlSystem::LtiControlSystem(RMatrix a, RVector b, RVector x0, double horizon)
    : a_(std::move(a)), b_(std::move(b)), x0_(std::move(x0)), horizon_(horizon) {
  require(a_.rows() >= 1 && a_.rows() == a_.cols(), "A must be square and non-empty");
  require(b_.size() == a_.rows(), "b must have the state dimension");
  require(x0_.size() == a_.rows(), "x0 must have the state dimension");
  require(a_.allFinite() && b_.allFinite() && x0_.allFinite(), "LTI data must be finite");
  require_horizon(horizon_);
}

VectorField vector_field(std::string_view name) {
  for (const auto& entry : kFields) {
    if (entry.name == name) return entry.field;
  }
  throw InvalidArgument("unknown vector field '" + std::string(name) + "'");
}

std::vector<std::string> vector_field_names() {
  std::vector<std::string> names;
  for (const auto& entry : kFields) names.emplace_back(entry.name);
  return names;
}

NonlinearControlSystem::NonlinearControlSystem(std::string rhs, RVector x0, double horizon,
                                               RMatrix a, RVector b, RMatrix coupling,
                                               std::map<std::string, double> params)
    : rhs_(std::move(rhs)),
      x0_(std::move(x0)),
      horizon_(horizon),
      a_(std::move(a)),
      b_(std::move(b)),
      coupling_(std::move(coupling)),
      params_(std::move(params)),
      field_(vector_field(rhs_)) {
  const Index n = x0_.size();
  require(n >= 1, "state dimension must be positive");
  require(x0_.allFinite(), "x0 must be finite");
  require_horizon(horizon_);
  for (const auto& [name, value] : params_) {
    require(std::isfinite(value), "parameter '" + name + "' must be finite");
  }
  if (rhs_ == "lti" || rhs_ == "lti_cubic" || rhs_ == "bilinear") {
    require(a_.rows() == n && a_.cols() == n, rhs_ + " field needs an n x n matrix A");
    require(a_.allFinite(), "A must be finite");
  }
  if (rhs_ == "lti" || rhs_ == "lti_cubic") {
    require(b_.size() == n && b_.allFinite(), rhs_ + " field needs a finite length-n vector b");
  }
  if (rhs_ == "lti_cubic") {
    require(params_.count("epsilon") == 1, "lti_cubic field needs parameter 'epsilon'");
  }
  if (rhs_ == "bilinear") {
    require(coupling_.rows() == n && coupling_.cols() == n && coupling_.allFinite(),
            "bilinear field needs a finite n x n coupling matrix");
  }
}

double NonlinearControlSystem::param(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) throw InvalidArgument("missing parameter '" + name + "'");
  return it->second;
}

NonlinearControlSystem NonlinearControlSystem::with_param(const std::string& name,
                                                          double value) const {
  auto params = params_;
  params[name] = value;
  return NonlinearControlSystem(rhs_, x0_, horizon_, a_, b_, coupling_, std::move(params));
}

NonlinearControlSystem lti_wrapper(const LtiControlSystem& sys) {
  return NonlinearControlSystem("lti", sys.x0(), sys.horizon(), sys.a(), sys.b());
}

NonlinearControlSystem lti_cubic(const LtiControlSystem& sys, double epsilon) {
  return NonlinearControlSystem("lti_cubic", sys.x0(), sys.horizon(), sys.a(), sys.b(), {},
                                {{"epsilon", epsilon}});
}

double horizon_of(const ControlSystem& sys) {
  return std::visit([](const auto& s) { return s.horizon(); }, sys);
}

Goal Goal::gate(CMatrix g) {
  require(g.rows() == g.cols() && g.rows() >= 1, "goal gate must be square");
  require(all_finite(g), "goal gate must be finite");
  require(unitarity_deviation(g) < kUnitaryTolerance, "goal gate is not unitary");
  Goal goal;
  goal.is_gate_ = true;
  goal.gate_ = std::move(g);
  return goal;
}

Goal Goal::state(RVector target) {
  require(target.size() >= 1 && target.allFinite(), "target state must be finite and non-empty");
  Goal goal;
  goal.target_ = std::move(target);
  return goal;
}

const CMatrix& Goal::gate_matrix() const {
  if (!is_gate_) throw InvalidArgument("goal is a target state, not a gate");
  return gate_;
}

const RVector& Goal::target_state() const {
  if (is_gate_) throw InvalidArgument("goal is a gate, not a target state");
  return target_;
}

QuantumPropagation propagate_quantum(const QuantumControlSystem& sys,
                                     const PiecewiseControl& w) {
  require_matching_horizon(sys.horizon(), w);
  const Index n = sys.levels();
  const Index m = w.intervals();
  const double dt = w.dt();

  QuantumPropagation out;
  out.intermediates.reserve(m + 1);
  out.spectra.reserve(m);
  out.intermediates.push_back(CMatrix::Identity(n, n));
  for (Index k = 0; k < m; ++k) {
    out.spectra.push_back(hermitian_spectrum(sys.drift() + w[k] * sys.coupling()));
    const CMatrix step = exp_i_hermitian(out.spectra.back(), dt);
    out.intermediates.push_back(step * out.intermediates.back());
  }
  out.final = out.intermediates.back();
  return out;
}

CMatrix interval_derivative(const HermitianSpectrum& spectrum, const CMatrix& coupling,
                            double dt) {
  const Index n = spectrum.values.size();
  CMatrix c = spectrum.vectors.adjoint() * coupling * spectrum.vectors;
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      // (e^{i dt la} - e^{i dt lb}) / (i dt (la - lb)), written without cancellation
      const double half_gap = 0.5 * dt * (spectrum.values(a) - spectrum.values(b));
      const double sinc = std::abs(half_gap) < 1e-8 ? 1.0 - half_gap * half_gap / 6.0
                                                     : std::sin(half_gap) / half_gap;
      const Complex mean_phase =
          std::polar(1.0, 0.5 * dt * (spectrum.values(a) + spectrum.values(b)));
      c(a, b) *= Complex(0.0, dt) * mean_phase * sinc;
    }
  }
  return spectrum.vectors * c * spectrum.vectors.adjoint();
}

CMatrix endpoint_derivative(const QuantumControlSystem& sys, const QuantumPropagation& prop,
                            Index k, double dt) {
  const auto idx = static_cast<std::size_t>(k);
  return prop.final * prop.intermediates[idx + 1].adjoint() *
         interval_derivative(prop.spectra[idx], sys.coupling(), dt) * prop.intermediates[idx];
}

LtiIntervalMaps lti_interval_maps(const LtiControlSystem& sys, double dt) {
  // exp(dt [[A, b], [0, 0]]) = [[exp(dt A), int_0^dt exp(sA) b ds], [0, 1]]
  const Index n = sys.dimension();
  RMatrix augmented = RMatrix::Zero(n + 1, n + 1);
  augmented.topLeftCorner(n, n) = dt * sys.a();
  augmented.topRightCorner(n, 1) = dt * sys.b();
  const RMatrix e = expm(augmented);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, 1)};
}

RMatrix lti_input_columns(const LtiControlSystem& sys, Index intervals) {
  require(intervals >= 1, "need at least one interval");
  const auto maps = lti_interval_maps(sys, sys.horizon() / static_cast<double>(intervals));
  RMatrix columns(sys.dimension(), intervals);
  columns.col(intervals - 1) = maps.input;
  for (Index k = intervals - 1; k > 0; --k) {
    columns.col(k - 1) = maps.transition * columns.col(k);
  }
  return columns;
}

RVector propagate_lti_closed_form(const LtiControlSystem& sys, const PiecewiseControl& w) {
  require_matching_horizon(sys.horizon(), w);
  const RMatrix free = expm(RMatrix(sys.horizon() * sys.a()));
  return free * sys.x0() + lti_input_columns(sys, w.intervals()) * w.values();
}

DivergenceError::DivergenceError(double time, double norm)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "state diverged at t = " << time << " (norm " << norm << ")";
        return msg.str();
      }()),
      time_(time) {}

RVector integrate_ode(const NonlinearControlSystem& sys, const PiecewiseControl& w,
                      int substeps) {
  require(substeps >= 1, "substeps must be at least 1");
  require_matching_horizon(sys.horizon(), w);
  const double h = w.dt() / substeps;
  RVector x = sys.x0();
  for (Index k = 0; k < w.intervals(); ++k) {
    const double u = w[k];
    for (int s = 0; s < substeps; ++s) {
      const RVector k1 = sys.evaluate(x, u);
      const RVector k2 = sys.evaluate(x + 0.5 * h * k1, u);
      const RVector k3 = sys.evaluate(x + 0.5 * h * k2, u);
      const RVector k4 = sys.evaluate(x + h * k3, u);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double norm = x.norm();
      if (!std::isfinite(norm) || norm > kDivergenceBound) {
        throw DivergenceError(static_cast<double>(k) * w.dt() + (s + 1) * h, norm);
      }
    }
  }
  return x;
}

double default_quantum_horizon(Index levels) {
  return 2.0 * static_cast<double>(levels * levels);
}

QuantumControlSystem sample_random_quantum_system(Index levels, std::uint64_t seed) {
  require(levels >= 2, "quantum systems need at least two levels");
  return sample_random_quantum_system(levels, seed, default_quantum_horizon(levels));
}

QuantumControlSystem sample_random_quantum_system(Index levels, std::uint64_t seed,
                                                  double horizon) {
  require(levels >= 2, "quantum systems need at least two levels");
  Rng rng = make_rng(seed);
  CMatrix drift = gaussian_hermitian(levels, rng);
  CMatrix coupling = gaussian_hermitian(levels, rng);
  return QuantumControlSystem(std::move(drift), std::move(coupling), horizon);
}

LtiControlSystem sample_random_lti(Index dimension, std::uint64_t seed, double horizon) {
  require(dimension >= 1, "LTI dimension must be positive");
  Rng rng = make_rng(seed);
  RMatrix a = gaussian_matrix(dimension, dimension, rng);
  RVector b = gaussian_vector(dimension, rng);
  RVector x0 = gaussian_vector(dimension, rng);
  return LtiControlSystem(std::move(a), std::move(b), std::move(x0), horizon);
}

}  // namespace ctlscape
