#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctlscape/serialize.hpp"

namespace ctlscape::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitCode : int {
  kSuccess = 0,
  kObjectiveNotMet = 1,
  kAssumptionFailure = 2,
  kInconclusive = 3,
  kUsage = 64,
};

/// Malformed descriptor or command line; maps to exit code 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// One point of a sweep; unset fields keep the descriptor's base setting.
struct SweepPoint {
  std::optional<double> fluence_bound;
  std::optional<double> epsilon;
};

struct SliceDirective {
  std::string center = "zero";  // "zero", "random", "climb" or "explicit"
  RVector center_values;
  std::optional<RMatrix> directions;  // M x 2; random orthonormal pair when unset
  double half_width = 1.0;
  int grid_points = 21;
};

struct MeasureDirective {
  std::optional<SystemFamily> family;
  std::optional<Index> dimension;
  std::optional<int> trials;
};

struct LtiVerifyDirective {
  int cases = 1;
  int substeps = 64;
  double tolerance = 1e-8;
};

/// Parsed experiment descriptor. `system` and `objective` are absent only
/// for descriptors that carry nothing but a measure block.
struct Descriptor {
  std::string digest;  // SHA-256 of the descriptor bytes
  std::optional<ControlSystem> system;
  std::optional<Objective> objective;
  Index intervals = 0;
  ClimbConfig climb;
  ClassifyThresholds thresholds;
  int starts = 50;
  double amplitude = 1.0;
  int escalation_factor = 10;
  double escalation_kick = 1e-3;
  std::vector<SweepPoint> sweep;  // cartesian product of the fluence and epsilon lists
  int check_samples = 16;
  int ode_substeps = 8;
  SliceDirective slice;
  MeasureDirective measure;
  LtiVerifyDirective lti_verify;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

/// Throws UsageError on malformed JSON, unknown keys, or inconsistent
/// system/goal/objective combinations.
Descriptor parse_descriptor(const std::string& text);

/// System of a sweep point: LTI systems gain the cubic term for an epsilon
/// point, nonlinear systems get their "epsilon" parameter replaced.
ControlSystem system_for(const Descriptor& d, const SweepPoint& point);

/// Entry point of the command-line tool; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctlscape::cli
