#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homsim/experiment.hpp"

namespace homsim {

/// Parsed run configuration. Mirrors the JSON config file: nested blocks with
/// exact key names; unknown keys are rejected at parse time.
struct RunConfig {
  struct Pump {
    double waist_mm{0.1};
    double wavelength_nm{351.0};
    double z_mm{0.0};
    double rotation_deg{0.0};
    struct Mode {
      int m{0};
      int n{0};
      double re{0};
      double im{0};
    };
    std::vector<Mode> modes;
  } pump;

  struct Crystal {
    double L_mm{2.0};
    double pump_wavelength_nm{351.0};
    bool thin_crystal{true};
  } crystal;

  struct Polarization {
    std::string kind{"symmetric_HH"};
    // row-major 2x2 [re, im] pairs, used only when kind == "custom"
    std::vector<std::vector<std::pair<double, double>>> matrix;
  } polarization;

  struct BeamSplitter {
    double t{0.7071067811865476};
    double r{0.7071067811865476};
  } beamsplitter;

  struct Detectors {
    double aperture_mm{2.0};
    double filter_fwhm_nm{1.0};
    double filter_center_nm{702.0};
    bool full_aperture{true};
    double center_x_mm{0.0};
    double center_y_mm{0.0};
    double plane_z_mm{500.0};
    std::string filter_shape{"gaussian"};
  } detectors;

  struct DelayScan {
    double min_um{-1200.0};
    double max_um{1200.0};
    int steps{41};
  } delay_scan;

  struct Noise {
    double mean_counts{1000.0};
    std::uint64_t seed{0};
  };
  std::optional<Noise> noise;

  struct Numerics {
    int pump_samples{128};
    double window_waists{5.0};
    int detection_samples{128};
    int oracle_samples{16};
    bool use_phi_route{false};
  } numerics;

  std::string preset_name;  // set when built from a preset
};

/// Parse a config file (strict: unknown keys and malformed values raise
/// ValidationError with the offending key path).
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Canonical JSON echo of a config (defaults resolved).
std::string config_to_json(const RunConfig& cfg);

/// Named scenario presets: fig4_even, fig4_odd, fig5_even, fig5_odd,
/// fig6_superposition.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Assemble the physics objects from a validated config.
Scenario<double> build_scenario(const RunConfig& cfg);
ScanConfig<double> build_scan_config(const RunConfig& cfg);

}  // namespace homsim
