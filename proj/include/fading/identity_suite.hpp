#pragma once

// Randomised check of the block-determinant identities against dense
// determinants, and of the non-negativity lemmas on random PSD matrices.

#include <cstdint>
#include <string>
#include <vector>

namespace fading {

struct IdentityCheck {
  std::string name;
  std::size_t instances{0};
  std::size_t failures{0};
  double worst{0};       // max relative error, or most negative eigenvalue
  double threshold{0};
  bool passed() const { return failures == 0; }
};

struct IdentitySuiteOptions {
  std::size_t instances{10000};
  std::size_t psd_instances{1000};
  std::uint64_t seed{1};
  double rel_tol{1e-10};
  double eig_floor{-1e-9};
};

/// Relative errors are taken against the larger of |exact| and the summed
/// magnitude of the terms on the expanded side.
std::vector<IdentityCheck> run_identity_suite(const IdentitySuiteOptions& options = {});

}  // namespace fading
