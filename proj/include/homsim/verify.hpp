#pragma once

#include <string>
#include <vector>

#include "homsim/config.hpp"

namespace homsim {

/// One verification entry: the factorized rate against its reference (the 4D
/// oracle or the closed-form parity law).
struct VerifyEntry {
  std::string name;
  double value{0};
  double reference{0};
  double deviation{0};
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  double max_deviation{0};
};

/// Run the factorized-vs-oracle equivalence suite (the 2x2 scenario matrix at
/// zero and far delay, on oracle-sized grids) plus the parity-law closed form
/// for the configured beam splitter.
VerifyReport run_verification(const RunConfig& cfg);

}  // namespace homsim
