#include "homsim/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "homsim/io.hpp"
#include "homsim/verify.hpp"

namespace homsim::cli {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string output_stem(const CommonOptions& opts, const RunConfig& cfg) {
  if (!opts.basename.empty()) return opts.basename;
  const std::string scenario = cfg.preset_name.empty() ? "custom" : cfg.preset_name;
  return scenario + "_" + utc_timestamp();
}

// Signed fixed-point with an unsigned zero, e.g. "+1.000000", "0.000000".
std::string format_component(double v) {
  char buf[32];
  const double rounded = std::round(v * 1e6) / 1e6;
  if (rounded == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.6f", 0.0);
  } else {
    std::snprintf(buf, sizeof(buf), "%+.6f", v);
  }
  return buf;
}

template <typename F>
int dispatch(F&& body) {
  try {
    return body();
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const NumericGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

RunConfig resolve_config(const CommonOptions& opts) {
  if (opts.config_path.empty() == opts.preset.empty())
    throw ValidationError("exactly one of --config or --preset is required");
  RunConfig cfg =
      opts.preset.empty() ? load_config(opts.config_path) : preset_config(opts.preset);
  if (opts.seed) {
    if (cfg.noise)
      cfg.noise->seed = *opts.seed;
    else
      cfg.noise = RunConfig::Noise{1000.0, *opts.seed};
  }
  return cfg;
}

int cmd_scan(const CommonOptions& opts) {
  return dispatch([&] {
    const RunConfig cfg = resolve_config(opts);
    const auto scan = build_scan_config(cfg);
    const auto curve = run_scan(scan);

    const std::string stem = output_stem(opts, cfg);
    namespace fs = std::filesystem;
    const fs::path base = fs::path(opts.out_dir) / stem;
    write_file_atomic(base.string() + ".csv", curve_to_csv(curve));
    write_file_atomic(base.string() + ".json", curve_sidecar_json(curve, cfg));
    std::cout << base.string() << ".csv\n" << base.string() << ".json\n";
    return kExitOk;
  });
}

int cmd_overlap(const CommonOptions& opts) {
  return dispatch([&] {
    const RunConfig cfg = resolve_config(opts);
    const auto scenario = build_scenario(cfg);
    const auto field = pump_field(scenario.pump, scenario.pump_grid);
    const auto p = parity_overlap_y(field);
    const char* label = "mixed";
    if (std::abs(p - 1.0) <= 1e-6)
      label = "even";
    else if (std::abs(p + 1.0) <= 1e-6)
      label = "odd";
    double im = std::round(p.imag() * 1e6) / 1e6;
    if (im == 0.0) im = 0.0;  // normalize -0
    char im_buf[32];
    std::snprintf(im_buf, sizeof(im_buf), "%.6f", im);
    std::cout << format_component(p.real()) << "," << im_buf << " " << label << "\n";
    return kExitOk;
  });
}

int cmd_dump_field(const CommonOptions& opts) {
  return dispatch([&] {
    const RunConfig cfg = resolve_config(opts);
    const auto scenario = build_scenario(cfg);
    const auto field = pump_field(scenario.pump, scenario.pump_grid);
    const std::string stem = output_stem(opts, cfg);
    namespace fs = std::filesystem;
    const fs::path base = fs::path(opts.out_dir) / (stem + "_field");
    if (opts.format == "bin") {
      write_field_binary(base.string() + ".bin", field);
      std::cout << base.string() << ".bin\n";
    } else if (opts.format == "csv") {
      write_field_csv(base.string() + ".csv", field);
      std::cout << base.string() << ".csv\n";
    } else {
      throw ValidationError("dump-field: format must be csv or bin");
    }
    return kExitOk;
  });
}

int cmd_verify(const CommonOptions& opts) {
  return dispatch([&] {
    const RunConfig cfg = resolve_config(opts);
    const auto report = run_verification(cfg);
    for (const auto& e : report.entries) {
      std::printf("%-32s value=%.9f reference=%.9f deviation=%.3e\n", e.name.c_str(), e.value,
                  e.reference, e.deviation);
    }
    std::printf("max deviation: %.3e\n", report.max_deviation);
    if (!(report.max_deviation < 1e-6)) {
      std::cerr << "verification breach: max deviation >= 1e-6\n";
      return kExitVerify;
    }
    return kExitOk;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Multimode two-photon interference simulator"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto add_common = [&opts](CLI::App* sub, bool with_out) {
    sub->add_option("--config", opts.config_path, "path to a JSON run configuration");
    sub->add_option("--preset", opts.preset,
                    "named scenario preset (fig4_even, fig4_odd, fig5_even, fig5_odd, "
                    "fig6_superposition)");
    sub->add_option("--seed", opts.seed, "override the counting-noise seed");
    if (with_out) {
      sub->add_option("--out", opts.out_dir, "output directory");
      sub->add_option("--basename", opts.basename,
                      "output file stem (default <scenario>_<timestamp>)");
    }
  };

  auto* scan = app.add_subcommand("scan", "run a delay scan and write CSV + JSON sidecar");
  add_common(scan, true);
  auto* overlap =
      app.add_subcommand("overlap", "print the pump's y-parity overlap and classification");
  add_common(overlap, false);
  auto* dump = app.add_subcommand("dump-field", "write the sampled pump field");
  add_common(dump, true);
  dump->add_option("--format", opts.format, "csv | bin");
  auto* verify =
      app.add_subcommand("verify", "factorized-vs-oracle equivalence and parity-law check");
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (scan->parsed()) return cmd_scan(opts);
  if (overlap->parsed()) return cmd_overlap(opts);
  if (dump->parsed()) return cmd_dump_field(opts);
  if (verify->parsed()) return cmd_verify(opts);
  return kExitConfig;
}

}  // namespace homsim::cli
