#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pathlaw {

/// One deterministic identity check: the largest deviation seen across the
/// whole corpus, and the tolerance it must stay under.
struct CheckResult {
  std::string name;
  double max_dev = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Runs the exact path-identity suite over `n_paths` seeded random paths
/// (2-64 knots, values in [-5,5], horizon 1).  Every check recomputes its
/// expected value from raw knot arrays, independently of the transform
/// implementations under test.
std::vector<CheckResult> run_identity_suite(std::uint64_t seed,
                                            std::size_t n_paths);

/// Runs the smoothed-transform numerics: exponential-functional invariance
/// under the smoothed retargeting map, and its stiff-limit convergence to
/// the exact retargeting transform.
std::vector<CheckResult> run_smoothing_suite(std::uint64_t seed);

}  // namespace pathlaw
