#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace c2b {

// One checked op (or composite graph). A check passes when the worst
// relative disagreement between analytic and central-difference gradients
// over the sampled coordinates stays within tolerance. Negative-control
// rows invert the expectation: their backward result is corrupted on
// purpose, so being reported as a failure is the correct outcome.
struct GradCheckResult {
  std::string name;
  double max_rel_error = 0.0;
  int coords_checked = 0;
  double tolerance = 0.0;
  bool passed = false;
  bool expect_failure = false;

  bool behaved() const { return expect_failure ? !passed : passed; }
};

// Runs every differentiable op against 64-bit central differences, plus one
// end-to-end pair-model loss. At least 20 coordinates are sampled per check,
// spread across the check's inputs. Deterministic in the seed.
std::vector<GradCheckResult> run_gradient_checks(uint64_t seed,
                                                 bool include_negative_control = true);

bool all_behaved(const std::vector<GradCheckResult>& results);

// One line per check: status, name, worst relative error, coordinate count,
// tolerance.
std::string format_gradcheck_report(const std::vector<GradCheckResult>& results);

}  // namespace c2b
