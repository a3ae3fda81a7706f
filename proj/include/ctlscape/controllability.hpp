#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctlscape/objective.hpp"
#include "ctlscape/systems.hpp"

namespace ctlscape {

/// Verdict of an assumption check. `not_applicable` marks a sample taken at a
/// critical point of J itself, where no steering direction is defined.
enum class Verdict { holds, fails, inconclusive, not_applicable };

std::string_view to_string(Verdict v);

inline constexpr double kDefaultRankTolerance = 1e-10;

/// Columns [b, Ab, A^2 b, ..., A^{N-1} b].
RMatrix kalman_controllability_matrix(const RMatrix& a, const RVector& b);

/// Number of singular values above tol * sigma_max * max(rows, cols).
Index numerical_rank(const RMatrix& m, double tol = kDefaultRankTolerance);

struct LtiControllability {
  bool controllable;
  Index rank;
  double smallest_retained_singular_value;
};

LtiControllability is_lti_controllable(const RMatrix& a, const RVector& b,
                                       double tol = kDefaultRankTolerance);

/// Two eigenvalues of A coincide (relative to the distinctness threshold), so
/// the Vandermonde factorization of the controllability matrix does not apply.
class DegenerateSpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Both sides of det[b, Ab, ..., A^{N-1}b] = det(Q) (prod_i c_i) det(V), where
/// A = Q D Q^{-1}, c = Q^{-1} b and V_ij = lambda_i^j. The det(Q) factor is
/// required for the identity to hold; distinct eigenvalues (zero allowed) are
/// the precondition.
struct VandermondeCheck {
  double lhs;
  double rhs;       // real part; the imaginary part is rounding for real A
  double rhs_imag;
  double relative_residual;
  double min_eigenvalue_gap;
};

VandermondeCheck vandermonde_identity_check(const RMatrix& a, const RVector& b,
                                            double distinctness = 1e-8);

/// Orthonormal (Hilbert-Schmidt) basis of the Lie algebra generated by iH0
/// and iHc, built by repeated bracketing.
struct LieAlgebraBasis {
  std::vector<CMatrix> elements;  // skew-Hermitian, trace-orthonormal
  Index dimension = 0;
  Index traceless_rank = 0;       // rank after projecting out the identity
  int depth_reached = 0;
  /// holds iff the algebra contains su(n); inconclusive if the depth cap
  /// stopped the closure before it stabilized.
  Verdict controllable = Verdict::fails;
};

/// max_depth <= 0 selects n^2, which always suffices for stabilization.
LieAlgebraBasis larc_closure(const CMatrix& h0, const CMatrix& hc, int max_depth = 0);

/// dx_T / dw_k as a (state dimension) x M matrix; quantum endpoints use the
/// realified coordinates of endpoint_state.
RMatrix endpoint_jacobian(const ControlSystem& sys, const PiecewiseControl& w,
                          const EvaluationOptions& opts = {});

struct Assumption2Options {
  double overlap_threshold = 1e-8;
  double critical_tolerance = 1e-9;  // |grad J| below this counts as zero
  double floor_margin = 1e-3;        // J within this of its minimum is "at the floor"
  double rank_tolerance = kDefaultRankTolerance;
};

struct Assumption2Result {
  Verdict verdict;
  double overlap;  // |projection of grad J onto span of the Jacobian| / |grad J|
  double gradient_norm;
};

Assumption2Result assumption2_check(const ControlSystem& sys, const PiecewiseControl& w,
                                    const Objective& obj, const Assumption2Options& opts = {},
                                    const EvaluationOptions& eval = {});

struct Assumption1Result {
  Verdict verdict;
  std::string method;  // "larc", "kalman" or "linearization"
  Index evidence;      // algebra dimension or controllability-matrix rank
  Index required;      // n^2 - 1 (traceless rank) or N
  Index traceless_rank = 0;
  int depth_reached = 0;
};

/// LARC for quantum systems, Kalman rank for LTI, Kalman rank of the
/// linearization at (x0, w = 0) for nonlinear systems.
Assumption1Result assumption1_check(const ControlSystem& sys);

struct Assumption2Summary {
  Verdict verdict;
  double min_overlap;  // over samples where the check applied; 0 if none did
  int samples;
  int holds;
  int fails;
  int not_applicable;
};

struct Assumption3Record {
  Index intervals;
  double horizon;
  std::optional<double> fluence_bound;
};

struct AssumptionReport {
  Assumption1Result assumption1;
  Assumption2Summary assumption2;
  Assumption3Record assumption3;
  std::uint64_t seed;
};

struct AssessmentOptions {
  Index intervals;
  int samples = 16;
  double amplitude = 1.0;
  std::optional<double> fluence_bound;
  std::uint64_t seed = 0;
  Assumption2Options assumption2;
  EvaluationOptions evaluation;
};

/// Runs Assumption I, Assumption II at `samples` seeded random controls, and
/// records the Assumption III resource settings.
AssumptionReport assess_assumptions(const ControlSystem& sys, const Objective& obj,
                                    const AssessmentOptions& opts);

enum class SystemFamily { quantum, lti };

std::string_view to_string(SystemFamily family);

struct MeasureResult {
  double fraction_controllable;
  std::vector<Verdict> verdicts;
};

/// Draws `trials` systems (trial i seeded by derive_seed(seed, i)) and reports
/// the fraction that pass the family's controllability test. The OpenMP
/// version distributes trials across `workers` threads and is bitwise
/// identical to the serial reference.
MeasureResult sample_controllability_measure(SystemFamily family, Index dimension, int trials,
                                             std::uint64_t seed, int workers = 1);
MeasureResult sample_controllability_measure_serial(SystemFamily family, Index dimension,
                                                    int trials, std::uint64_t seed);

}  // namespace ctlscape
