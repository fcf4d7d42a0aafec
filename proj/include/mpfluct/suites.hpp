#pragma once

#include <string>
#include <vector>

namespace mpfluct::suites {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Exact partition and Chebyshev identities.
std::vector<Check> combinatorics_suite();

/// Exact dependence-statistic, chiral and U_n identities plus a few
/// floating-point trace identities on small seeded matrices.
std::vector<Check> structure_suite();

}  // namespace mpfluct::suites
