#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hypext {

// Cross-module invariant suites behind the `verify` CLI command; the
// acceptance harness runs the same functions at pinned seeds.
struct CheckResult {
  std::string name;
  double value = 0;   // measured quantity (defect, error, count, ...)
  double bound = 0;   // what it must stay below / above
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

SuiteResult verify_mobius(std::uint64_t seed);       // distance/conformal/difference identities
SuiteResult verify_kernel(std::uint64_t seed);       // kernel mass + constants + Poisson closed form
SuiteResult verify_covariance(std::uint64_t seed);   // H(u o T) = (Hu) o T under refinement
SuiteResult verify_radial_exact(std::uint64_t seed); // annulus energy identity
SuiteResult verify_weak_type(std::uint64_t seed);    // radial weak-type bound
SuiteResult verify_covering(std::uint64_t seed);     // packing/coverage/coloring bounds

// selector in {mobius, kernel, covariance, radial-exact, weak-type,
// covering, all}
std::vector<SuiteResult> run_suites(const std::string& selector,
                                    std::uint64_t seed);

}  // namespace hypext
