#include "ctlscape/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctlscape/random.hpp"

namespace ctlscape {

namespace {

constexpr double kLarcTolerance = 1e-9;

Index rank_from_singular_values(const RVector& sv, Index rows, Index cols, double tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = tol * sv(0) * static_cast<double>(std::max(rows, cols));
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;
  return rank;
}

// Gram-Schmidt (two passes) against an orthonormal basis; appends if the
// normalized residual survives.
bool try_extend(std::vector<CMatrix>& basis, const CMatrix& candidate) {
  const double norm = std::sqrt(std::max(0.0, hs_inner(candidate, candidate)));
  if (norm < 1e-13) return false;
  CMatrix y = candidate / norm;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& e : basis) y -= hs_inner(e, y) * e;
  }
  const double residual = std::sqrt(std::max(0.0, hs_inner(y, y)));
  if (residual < kLarcTolerance) return false;
  basis.push_back(y / residual);
  return true;
}

Verdict measure_one(SystemFamily family, Index dimension, std::uint64_t seed) {
  if (family == SystemFamily::lti) {
    const auto sys = sample_random_lti(dimension, seed);
    return is_lti_controllable(sys.a(), sys.b()).controllable ? Verdict::holds : Verdict::fails;
  }
  const auto sys = sample_random_quantum_system(dimension, seed);
  return larc_closure(sys.drift(), sys.coupling()).controllable;
}

MeasureResult tally(std::vector<Verdict> verdicts) {
  const auto holds = std::count(verdicts.begin(), verdicts.end(), Verdict::holds);
  const double fraction = static_cast<double>(holds) / static_cast<double>(verdicts.size());
  return {fraction, std::move(verdicts)};
}

void require_trials(int trials) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::inconclusive:
      return "inconclusive";
    case Verdict::not_applicable:
      return "not-applicable-at-critical-point";
  }
  return "unknown";
}

std::string_view to_string(SystemFamily family) {
  return family == SystemFamily::quantum ? "quantum" : "lti";
}

RMatrix kalman_controllability_matrix(const RMatrix& a, const RVector& b) {
  if (a.rows() != a.cols() || b.size() != a.rows()) {
    throw InvalidArgument("controllability matrix needs square A and matching b");
  }
  const Index n = a.rows();
  RMatrix k(n, n);
  if (n == 0) return k;
  k.col(0) = b;
  for (Index j = 1; j < n; ++j) k.col(j) = a * k.col(j - 1);
  return k;
}

Index numerical_rank(const RMatrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<RMatrix> svd(m);
  return rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), tol);
}

LtiControllability is_lti_controllable(const RMatrix& a, const RVector& b, double tol) {
  const RMatrix k = kalman_controllability_matrix(a, b);
  Eigen::JacobiSVD<RMatrix> svd(k);
  const RVector& sv = svd.singularValues();
  const Index rank = rank_from_singular_values(sv, k.rows(), k.cols(), tol);
  const double smallest = rank > 0 ? sv(rank - 1) : 0.0;
  return {rank == a.rows(), rank, smallest};
}

VandermondeCheck vandermonde_identity_check(const RMatrix& a, const RVector& b,
                                            double distinctness) {
  if (a.rows() != a.cols() || b.size() != a.rows() || a.rows() == 0) {
    throw InvalidArgument("Vandermonde check needs square A and matching b");
  }
  const Index n = a.rows();
  Eigen::EigenSolver<RMatrix> eig(a);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const CVector lambda = eig.eigenvalues();
  const CMatrix q = eig.eigenvectors();

  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  double min_gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) min_gap = std::min(min_gap, std::abs(lambda(i) - lambda(j)));
  if (n > 1 && min_gap <= distinctness * scale) {
    std::ostringstream msg;
    msg << "eigenvalues of A are not distinct (min gap " << min_gap << ")";
    throw DegenerateSpectrumError(msg.str());
  }

  const CVector c = q.partialPivLu().solve(b.cast<Complex>());
  Complex vandermonde = 1.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) vandermonde *= lambda(j) - lambda(i);
  const Complex rhs = q.determinant() * c.prod() * vandermonde;

  const double lhs = kalman_controllability_matrix(a, b).determinant();
  const double denom =
      std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::epsilon()});
  return {lhs, rhs.real(), rhs.imag(), std::abs(lhs - rhs) / denom,
          n > 1 ? min_gap : 0.0};
}

LieAlgebraBasis larc_closure(const CMatrix& h0, const CMatrix& hc, int max_depth) {
  if (h0.rows() != h0.cols() || hc.rows() != h0.rows() || hc.cols() != h0.cols()) {
    throw InvalidArgument("LARC needs square generators of equal size");
  }
  const Index n = h0.rows();
  const Index full = n * n;
  const Complex i_unit(0.0, 1.0);
  if (max_depth <= 0) max_depth = static_cast<int>(full);

  LieAlgebraBasis out;
  auto& basis = out.elements;
  std::vector<std::size_t> frontier;
  for (const CMatrix* h : {&h0, &hc}) {
    if (try_extend(basis, i_unit * (*h))) frontier.push_back(basis.size() - 1);
  }

  int depth = 0;
  while (!frontier.empty() && static_cast<Index>(basis.size()) < full && depth < max_depth) {
    ++depth;
    std::vector<std::size_t> next;
    const std::size_t existing = basis.size();
    for (const std::size_t i : frontier) {
      for (std::size_t j = 0; j < existing; ++j) {
        if (i == j) continue;
        if (try_extend(basis, commutator(basis[i], basis[j]))) next.push_back(basis.size() - 1);
        if (static_cast<Index>(basis.size()) == full) break;
      }
      if (static_cast<Index>(basis.size()) == full) break;
    }
    frontier = std::move(next);
  }
  const bool stabilized = frontier.empty() || static_cast<Index>(basis.size()) == full;

  RMatrix traceless(2 * full, static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const CMatrix& x = basis[k];
    traceless.col(static_cast<Index>(k)) =
        realify(CMatrix(x - (x.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n)));
  }
  out.dimension = static_cast<Index>(basis.size());
  out.traceless_rank = basis.empty() ? 0 : numerical_rank(traceless, kLarcTolerance);
  out.depth_reached = depth;
  if (out.traceless_rank >= full - 1) {
    out.controllable = Verdict::holds;
  } else {
    out.controllable = stabilized ? Verdict::fails : Verdict::inconclusive;
  }
  return out;
}

RMatrix endpoint_jacobian(const ControlSystem& sys, const PiecewiseControl& w,
                          const EvaluationOptions& opts) {
  if (const auto* q = std::get_if<QuantumControlSystem>(&sys)) {
    const auto prop = propagate_quantum(*q, w);
    const Index n = q->levels();
    RMatrix jac(2 * n * n, w.intervals());
    for (Index k = 0; k < w.intervals(); ++k) {
      jac.col(k) = realify(endpoint_derivative(*q, prop, k, w.dt()));
    }
    return jac;
  }
  if (const auto* l = std::get_if<LtiControlSystem>(&sys)) {
    return lti_input_columns(*l, w.intervals());
  }
  const auto& nl = std::get<NonlinearControlSystem>(sys);
  RMatrix jac(nl.dimension(), w.intervals());
  RVector probe = w.values();
  for (Index k = 0; k < w.intervals(); ++k) {
    const double h = 1e-6 * (1.0 + std::abs(w[k]));
    probe(k) = w[k] + h;
    const RVector up = integrate_ode(nl, w.with_values(probe), opts.ode_substeps);
    probe(k) = w[k] - h;
    const RVector down = integrate_ode(nl, w.with_values(probe), opts.ode_substeps);
    probe(k) = w[k];
    jac.col(k) = (up - down) / (2.0 * h);
  }
  return jac;
}

Assumption2Result assumption2_check(const ControlSystem& sys, const PiecewiseControl& w,
                                    const Objective& obj, const Assumption2Options& opts,
                                    const EvaluationOptions& eval) {
  require_compatible(sys, obj);
  const RVector endpoint = endpoint_state(sys, w, eval);
  const RVector g = endpoint_gradient(obj, endpoint);
  const double gnorm = g.norm();
  if (gnorm <= opts.critical_tolerance) {
    // Zero gradient of J. At J's floor nothing can be steered upward at first
    // order; elsewhere the endpoint is a critical point of J (top or saddle).
    bool at_floor = false;
    if (obj.kind() == ObjectiveKind::gate_fidelity) {
      const auto* q = std::get_if<QuantumControlSystem>(&sys);
      const double value = gate_fidelity(propagate_quantum(*q, w).final,
                                         obj.goal().gate_matrix()).normalized;
      at_floor = value <= opts.floor_margin;
    }
    return {at_floor ? Verdict::fails : Verdict::not_applicable, 0.0, gnorm};
  }
  const RMatrix jac = endpoint_jacobian(sys, w, eval);
  Eigen::JacobiSVD<RMatrix> svd(jac, Eigen::ComputeThinU);
  const Index rank =
      rank_from_singular_values(svd.singularValues(), jac.rows(), jac.cols(), opts.rank_tolerance);
  const RMatrix basis = svd.matrixU().leftCols(rank);
  const double overlap = (basis.transpose() * g).norm() / gnorm;
  return {overlap > opts.overlap_threshold ? Verdict::holds : Verdict::fails, overlap, gnorm};
}

Assumption1Result assumption1_check(const ControlSystem& sys) {
  if (const auto* q = std::get_if<QuantumControlSystem>(&sys)) {
    const auto basis = larc_closure(q->drift(), q->coupling());
    const Index n = q->levels();
    return {basis.controllable, "larc", basis.dimension, n * n - 1, basis.traceless_rank,
            basis.depth_reached};
  }
  if (const auto* l = std::get_if<LtiControlSystem>(&sys)) {
    const auto r = is_lti_controllable(l->a(), l->b());
    return {r.controllable ? Verdict::holds : Verdict::fails, "kalman", r.rank, l->dimension()};
  }
  const auto& nl = std::get<NonlinearControlSystem>(sys);
  const Index n = nl.dimension();
  RMatrix a(n, n);
  const RVector& x0 = nl.x0();
  for (Index j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x0(j)));
    RVector up = x0, down = x0;
    up(j) += h;
    down(j) -= h;
    a.col(j) = (nl.evaluate(up, 0.0) - nl.evaluate(down, 0.0)) / (2.0 * h);
  }
  const RVector b = (nl.evaluate(x0, 1e-6) - nl.evaluate(x0, -1e-6)) / 2e-6;
  const auto r = is_lti_controllable(a, b);
  return {r.controllable ? Verdict::holds : Verdict::fails, "linearization", r.rank, n};
}

AssumptionReport assess_assumptions(const ControlSystem& sys, const Objective& obj,
                                    const AssessmentOptions& opts) {
  require_compatible(sys, obj);
  if (opts.intervals < 1) throw InvalidArgument("intervals must be at least 1");
  if (opts.samples < 1) throw InvalidArgument("assumption II needs at least one sample");

  AssumptionReport report;
  report.seed = opts.seed;
  report.assumption1 = assumption1_check(sys);

  auto& a2 = report.assumption2;
  a2 = {Verdict::not_applicable, 0.0, opts.samples, 0, 0, 0};
  double min_overlap = std::numeric_limits<double>::infinity();
  const double horizon = horizon_of(sys);
  for (int i = 0; i < opts.samples; ++i) {
    Rng rng = make_rng(derive_seed(opts.seed, static_cast<std::uint64_t>(i)));
    const PiecewiseControl w(uniform_box(opts.intervals, opts.amplitude, rng), horizon);
    const auto r = assumption2_check(sys, w, obj, opts.assumption2, opts.evaluation);
    switch (r.verdict) {
      case Verdict::holds:
        ++a2.holds;
        min_overlap = std::min(min_overlap, r.overlap);
        break;
      case Verdict::fails:
        ++a2.fails;
        min_overlap = std::min(min_overlap, r.overlap);
        break;
      default:
        ++a2.not_applicable;
        break;
    }
  }
  if (a2.fails > 0) {
    a2.verdict = Verdict::fails;
  } else if (a2.holds > 0) {
    a2.verdict = Verdict::holds;
  }
  a2.min_overlap = std::isfinite(min_overlap) ? min_overlap : 0.0;

  report.assumption3 = {opts.intervals, horizon, opts.fluence_bound};
  return report;
}

MeasureResult sample_controllability_measure_serial(SystemFamily family, Index dimension,
                                                    int trials, std::uint64_t seed) {
  require_trials(trials);
  std::vector<Verdict> verdicts(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    verdicts[static_cast<std::size_t>(i)] =
        measure_one(family, dimension, derive_seed(seed, static_cast<std::uint64_t>(i)));
  }
  return tally(std::move(verdicts));
}

MeasureResult sample_controllability_measure(SystemFamily family, Index dimension, int trials,
                                             std::uint64_t seed, int workers) {
  require_trials(trials);
  if (family == SystemFamily::quantum && dimension < 2) {
    throw InvalidArgument("quantum systems need at least two levels");
  }
  if (dimension < 1) throw InvalidArgument("dimension must be positive");
  std::vector<Verdict> verdicts(static_cast<std::size_t>(trials), Verdict::inconclusive);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (int i = 0; i < trials; ++i) {
    try {
      verdicts[static_cast<std::size_t>(i)] =
          measure_one(family, dimension, derive_seed(seed, static_cast<std::uint64_t>(i)));
    } catch (const std::exception&) {
      verdicts[static_cast<std::size_t>(i)] = Verdict::inconclusive;
    }
  }
  return tally(std::move(verdicts));
}

}  // namespace ctlscape
