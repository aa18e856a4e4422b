#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agekin {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidateOptions {
  bool quick = false;  // alpha = 1 identity subset only
  std::uint64_t seed = 20260809;
  unsigned threads = 0;
  std::string outdir;  // when set, CSV artifacts + a manifest are written
};

/// Cross-layer reconciliation suite: stochastic ensembles against the
/// deterministic solvers, the moment closed forms, the Bromwich evaluators,
/// and the reference growth laws, plus a byte-level determinism probe.
std::vector<CriterionResult> run_validation(const ValidateOptions& opt);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace agekin
