#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agaf/common.hpp"

namespace agaf {

struct IdentityResult {
  std::string name;
  std::size_t instances = 0;
  double max_residual = 0.0;
  double threshold = 1e-9;
  bool pass() const { return instances > 0 && max_residual < threshold; }
};

struct SuiteOptions {
  std::vector<double> qs{0.1, 0.3, 0.5};
  std::vector<double> rs{0.2, 0.6, 1.5};
  std::uint64_t seed = 7;
  int instances = 100;
  // negative control: flips the sign of the anchor product in the Mccullough-Shen form
  bool flip_mccullough_sign = false;
};

// Randomized checks of the closed-form identities, in a fixed order:
// theta-inversion, quasi-periodicity, weierstrass-addition, frobenius,
// borchardt, mccullough-shen, functional-equations, kappa-symmetries,
// szego-bergman, hyperdet-lemma.
std::vector<IdentityResult> run_identity_suite(const SuiteOptions& opts);

}  // namespace agaf
