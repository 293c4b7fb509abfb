#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "homsim/config.hpp"

namespace homsim::cli {

/// Exit codes, disjoint by failure class.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;    // config validation failures
inline constexpr int kExitResource = 3;  // numeric guards and size caps
inline constexpr int kExitVerify = 4;    // verification deviation breach

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir{"."};
  std::string basename;  // overrides <scenario>_<timestamp> naming
  std::optional<std::uint64_t> seed;
  std::string format{"csv"};  // dump-field: csv | bin
};

/// Resolve --config/--preset (exactly one), applying the --seed override.
RunConfig resolve_config(const CommonOptions& opts);

int cmd_scan(const CommonOptions& opts);
int cmd_overlap(const CommonOptions& opts);
int cmd_dump_field(const CommonOptions& opts);
int cmd_verify(const CommonOptions& opts);

/// Full argv entry point used by the binary (CLI11 parsing + dispatch).
int run(int argc, char** argv);

}  // namespace homsim::cli
