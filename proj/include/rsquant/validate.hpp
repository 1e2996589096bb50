#pragma once

#include <string>
#include <vector>

namespace rsquant {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // short failure context, empty when passed
};

struct ValidationOptions {
  /// Test fixture: evaluates the identity checks against a deliberately
  /// perturbed incomplete-beta so failure reporting can be exercised.
  bool corrupt_beta = false;
};

/// Fast self-check suite: beta identities, the stratum mixture identity,
/// HD weight telescoping, psi normalization, the small-design ORSS oracle
/// comparison, k = 1 degeneracies and quantile/CDF inversion.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

}  // namespace rsquant
