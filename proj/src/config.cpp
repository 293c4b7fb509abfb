#include "homsim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace homsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError("config: " + path + ": " + msg);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
}

template <typename T>
T get_required(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "." + key, "missing required key");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "wrong type");
  }
}

template <typename T>
T get_optional(const json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "wrong type");
  }
}

RunConfig::Pump parse_pump(const json& j) {
  check_keys(j, "pump", {"waist_mm", "wavelength_nm", "z_mm", "rotation_deg", "modes"});
  RunConfig::Pump p;
  p.waist_mm = get_required<double>(j, "pump", "waist_mm");
  p.wavelength_nm = get_required<double>(j, "pump", "wavelength_nm");
  p.z_mm = get_optional<double>(j, "pump", "z_mm", 0.0);
  p.rotation_deg = get_optional<double>(j, "pump", "rotation_deg", 0.0);
  if (!j.contains("modes") || !j.at("modes").is_array() || j.at("modes").empty())
    fail("pump.modes", "expected a non-empty array");
  int idx = 0;
  for (const auto& m : j.at("modes")) {
    const std::string path = "pump.modes[" + std::to_string(idx++) + "]";
    check_keys(m, path, {"m", "n", "re", "im"});
    RunConfig::Pump::Mode mode;
    mode.m = get_required<int>(m, path, "m");
    mode.n = get_required<int>(m, path, "n");
    mode.re = get_required<double>(m, path, "re");
    mode.im = get_optional<double>(m, path, "im", 0.0);
    p.modes.push_back(mode);
  }
  return p;
}

RunConfig::Polarization parse_polarization(const json& j) {
  check_keys(j, "polarization", {"kind", "matrix"});
  RunConfig::Polarization p;
  p.kind = get_required<std::string>(j, "polarization", "kind");
  if (p.kind != "symmetric_HH" && p.kind != "antisymmetric_singlet" && p.kind != "custom")
    fail("polarization.kind", "expected symmetric_HH | antisymmetric_singlet | custom");
  if (p.kind == "custom") {
    if (!j.contains("matrix")) fail("polarization.matrix", "required for kind = custom");
    const auto& m = j.at("matrix");
    if (!m.is_array() || m.size() != 2) fail("polarization.matrix", "expected 2 rows");
    for (int r = 0; r < 2; ++r) {
      const auto& row = m.at(r);
      if (!row.is_array() || row.size() != 2)
        fail("polarization.matrix[" + std::to_string(r) + "]", "expected 2 entries");
      std::vector<std::pair<double, double>> out_row;
      for (int c = 0; c < 2; ++c) {
        const auto& e = row.at(c);
        if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number())
          fail("polarization.matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]",
               "expected [re, im]");
        out_row.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
      }
      p.matrix.push_back(out_row);
    }
  } else if (j.contains("matrix")) {
    fail("polarization.matrix", "only valid for kind = custom");
  }
  return p;
}

RunConfig parse_json(const json& root) {
  check_keys(root, "<root>",
             {"pump", "crystal", "polarization", "beamsplitter", "detectors", "delay_scan",
              "noise", "numerics"});
  RunConfig cfg;
  if (!root.contains("pump")) fail("pump", "missing required block");
  cfg.pump = parse_pump(root.at("pump"));

  if (root.contains("crystal")) {
    const auto& j = root.at("crystal");
    check_keys(j, "crystal", {"L_mm", "pump_wavelength_nm", "thin_crystal"});
    cfg.crystal.L_mm = get_required<double>(j, "crystal", "L_mm");
    cfg.crystal.pump_wavelength_nm = get_required<double>(j, "crystal", "pump_wavelength_nm");
    cfg.crystal.thin_crystal = get_optional<bool>(j, "crystal", "thin_crystal", true);
  } else {
    cfg.crystal.pump_wavelength_nm = cfg.pump.wavelength_nm;
  }

  if (!root.contains("polarization")) fail("polarization", "missing required block");
  cfg.polarization = parse_polarization(root.at("polarization"));

  if (root.contains("beamsplitter")) {
    const auto& j = root.at("beamsplitter");
    check_keys(j, "beamsplitter", {"t", "r"});
    cfg.beamsplitter.t = get_required<double>(j, "beamsplitter", "t");
    cfg.beamsplitter.r = get_required<double>(j, "beamsplitter", "r");
  }

  if (root.contains("detectors")) {
    const auto& j = root.at("detectors");
    check_keys(j, "detectors",
               {"aperture_mm", "filter_fwhm_nm", "filter_center_nm", "full_aperture",
                "center_x_mm", "center_y_mm", "plane_z_mm", "filter_shape"});
    auto& d = cfg.detectors;
    d.aperture_mm = get_required<double>(j, "detectors", "aperture_mm");
    d.filter_fwhm_nm = get_required<double>(j, "detectors", "filter_fwhm_nm");
    d.filter_center_nm = get_required<double>(j, "detectors", "filter_center_nm");
    d.full_aperture = get_optional<bool>(j, "detectors", "full_aperture", true);
    d.center_x_mm = get_optional<double>(j, "detectors", "center_x_mm", 0.0);
    d.center_y_mm = get_optional<double>(j, "detectors", "center_y_mm", 0.0);
    d.plane_z_mm = get_optional<double>(j, "detectors", "plane_z_mm", 500.0);
    d.filter_shape = get_optional<std::string>(j, "detectors", "filter_shape", "gaussian");
    if (d.filter_shape != "gaussian" && d.filter_shape != "rect_lambda")
      fail("detectors.filter_shape", "expected gaussian | rect_lambda");
  }

  if (root.contains("delay_scan")) {
    const auto& j = root.at("delay_scan");
    check_keys(j, "delay_scan", {"min_um", "max_um", "steps"});
    cfg.delay_scan.min_um = get_required<double>(j, "delay_scan", "min_um");
    cfg.delay_scan.max_um = get_required<double>(j, "delay_scan", "max_um");
    cfg.delay_scan.steps = get_required<int>(j, "delay_scan", "steps");
  }

  if (root.contains("noise")) {
    const auto& j = root.at("noise");
    check_keys(j, "noise", {"mean_counts", "seed"});
    RunConfig::Noise n;
    n.mean_counts = get_required<double>(j, "noise", "mean_counts");
    n.seed = get_optional<std::uint64_t>(j, "noise", "seed", 0);
    cfg.noise = n;
  }

  if (root.contains("numerics")) {
    const auto& j = root.at("numerics");
    check_keys(j, "numerics",
               {"pump_samples", "window_waists", "detection_samples", "oracle_samples",
                "use_phi_route"});
    auto& n = cfg.numerics;
    n.pump_samples = get_optional<int>(j, "numerics", "pump_samples", 128);
    n.window_waists = get_optional<double>(j, "numerics", "window_waists", 5.0);
    n.detection_samples = get_optional<int>(j, "numerics", "detection_samples", 128);
    n.oracle_samples = get_optional<int>(j, "numerics", "oracle_samples", 16);
    n.use_phi_route = get_optional<bool>(j, "numerics", "use_phi_route", false);
  }
  return cfg;
}

json mode_to_json(const RunConfig::Pump::Mode& m) {
  return json{{"m", m.m}, {"n", m.n}, {"re", m.re}, {"im", m.im}};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_json(root);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json root;
  json modes = json::array();
  for (const auto& m : cfg.pump.modes) modes.push_back(mode_to_json(m));
  root["pump"] = {{"waist_mm", cfg.pump.waist_mm},
                  {"wavelength_nm", cfg.pump.wavelength_nm},
                  {"z_mm", cfg.pump.z_mm},
                  {"rotation_deg", cfg.pump.rotation_deg},
                  {"modes", modes}};
  root["crystal"] = {{"L_mm", cfg.crystal.L_mm},
                     {"pump_wavelength_nm", cfg.crystal.pump_wavelength_nm},
                     {"thin_crystal", cfg.crystal.thin_crystal}};
  root["polarization"] = {{"kind", cfg.polarization.kind}};
  if (cfg.polarization.kind == "custom") {
    json m = json::array();
    for (const auto& row : cfg.polarization.matrix) {
      json r = json::array();
      for (const auto& e : row) r.push_back(json::array({e.first, e.second}));
      m.push_back(r);
    }
    root["polarization"]["matrix"] = m;
  }
  root["beamsplitter"] = {{"t", cfg.beamsplitter.t}, {"r", cfg.beamsplitter.r}};
  root["detectors"] = {{"aperture_mm", cfg.detectors.aperture_mm},
                       {"filter_fwhm_nm", cfg.detectors.filter_fwhm_nm},
                       {"filter_center_nm", cfg.detectors.filter_center_nm},
                       {"full_aperture", cfg.detectors.full_aperture},
                       {"center_x_mm", cfg.detectors.center_x_mm},
                       {"center_y_mm", cfg.detectors.center_y_mm},
                       {"plane_z_mm", cfg.detectors.plane_z_mm},
                       {"filter_shape", cfg.detectors.filter_shape}};
  root["delay_scan"] = {{"min_um", cfg.delay_scan.min_um},
                        {"max_um", cfg.delay_scan.max_um},
                        {"steps", cfg.delay_scan.steps}};
  if (cfg.noise)
    root["noise"] = {{"mean_counts", cfg.noise->mean_counts}, {"seed", cfg.noise->seed}};
  root["numerics"] = {{"pump_samples", cfg.numerics.pump_samples},
                      {"window_waists", cfg.numerics.window_waists},
                      {"detection_samples", cfg.numerics.detection_samples},
                      {"oracle_samples", cfg.numerics.oracle_samples},
                      {"use_phi_route", cfg.numerics.use_phi_route}};
  return root.dump(2);
}

std::vector<std::string> preset_names() {
  return {"fig4_even", "fig4_odd", "fig5_even", "fig5_odd", "fig6_superposition"};
}

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  const double inv_sqrt2 = 1 / std::numbers::sqrt2;
  if (name == "fig4_even") {
    cfg.pump.modes = {{1, 0, 1.0, 0.0}};
    cfg.polarization.kind = "symmetric_HH";
  } else if (name == "fig4_odd") {
    cfg.pump.modes = {{0, 1, 1.0, 0.0}};
    cfg.polarization.kind = "symmetric_HH";
  } else if (name == "fig5_even") {
    cfg.pump.modes = {{1, 0, 1.0, 0.0}};
    cfg.polarization.kind = "antisymmetric_singlet";
  } else if (name == "fig5_odd") {
    cfg.pump.modes = {{0, 1, 1.0, 0.0}};
    cfg.polarization.kind = "antisymmetric_singlet";
  } else if (name == "fig6_superposition") {
    cfg.pump.modes = {{1, 0, inv_sqrt2, 0.0}, {0, 1, inv_sqrt2, 0.0}};
    cfg.polarization.kind = "symmetric_HH";
  } else {
    throw ValidationError("unknown preset '" + name + "'");
  }
  cfg.preset_name = name;
  return cfg;
}

Scenario<double> build_scenario(const RunConfig& cfg) {
  Scenario<double> sc;

  const double waist = cfg.pump.waist_mm * 1e-3;
  const double wavelength = cfg.pump.wavelength_nm * 1e-9;
  if (!(waist > 0)) throw ValidationError("config: pump.waist_mm must be positive");
  if (!(wavelength > 0)) throw ValidationError("config: pump.wavelength_nm must be positive");
  const double k = 2 * std::numbers::pi / wavelength;
  sc.pump.beam = BeamSpec<double>{waist, k * waist * waist / 2, k, cfg.pump.z_mm * 1e-3};
  sc.pump.rotation_rad = cfg.pump.rotation_deg * std::numbers::pi / 180;

  double power = 0;
  for (const auto& m : cfg.pump.modes) {
    if (m.m < 0 || m.n < 0) throw ValidationError("config: pump mode indices must be >= 0");
    power += m.re * m.re + m.im * m.im;
  }
  if (!(power > 0)) throw ValidationError("config: pump modes have zero total power");
  const double scale = 1 / std::sqrt(power);
  for (const auto& m : cfg.pump.modes)
    sc.pump.terms.push_back({m.m, m.n, std::complex<double>{m.re * scale, m.im * scale}});

  if (cfg.numerics.pump_samples < 2 || cfg.numerics.detection_samples < 2)
    throw ValidationError("config: numerics sample counts must be >= 2");
  if (!(cfg.numerics.window_waists > 0))
    throw ValidationError("config: numerics.window_waists must be positive");
  const double window = cfg.numerics.window_waists * waist;
  sc.pump_grid = make_grid(cfg.numerics.pump_samples, cfg.numerics.pump_samples, window, window);

  if (cfg.polarization.kind == "symmetric_HH") {
    sc.pol = make_polarization<double>(PolarizationKind::symmetric_HH);
  } else if (cfg.polarization.kind == "antisymmetric_singlet") {
    sc.pol = make_polarization<double>(PolarizationKind::antisymmetric_singlet);
  } else {
    if (cfg.polarization.matrix.size() != 2)
      throw ValidationError("config: polarization.matrix required for kind = custom");
    Eigen::Matrix<std::complex<double>, 2, 2> m;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        m(r, c) = {cfg.polarization.matrix[r][c].first, cfg.polarization.matrix[r][c].second};
    sc.pol = make_polarization<double>(PolarizationKind::custom, m);
  }

  sc.bs = BeamSplitterSpec<double>{cfg.beamsplitter.t, cfg.beamsplitter.r};
  validate(sc.bs);

  DetectorSpec<double> det;
  det.aperture_radius = cfg.detectors.aperture_mm * 1e-3 / 2;  // diameter in config
  det.center_x = cfg.detectors.center_x_mm * 1e-3;
  det.center_y = cfg.detectors.center_y_mm * 1e-3;
  det.filter_fwhm = cfg.detectors.filter_fwhm_nm * 1e-9;
  det.filter_center = cfg.detectors.filter_center_nm * 1e-9;
  det.full_aperture = cfg.detectors.full_aperture;
  validate(det);
  sc.det1 = det;
  sc.det2 = det;
  sc.filter_shape = cfg.detectors.filter_shape == "rect_lambda" ? FilterShape::rect_lambda
                                                                : FilterShape::gaussian;

  const double k_sum = 2 * (2 * std::numbers::pi / det.filter_center);
  const double k_pump = 2 * std::numbers::pi / (cfg.crystal.pump_wavelength_nm * 1e-9);
  if (std::abs(k_sum - k_pump) > 1e-9 * k_pump)
    throw ValidationError(
        "config: non-degenerate configuration (filter_center_nm must equal "
        "2 * crystal.pump_wavelength_nm)");
  if (std::abs(k - k_pump) > 1e-9 * k_pump)
    throw ValidationError(
        "config: pump.wavelength_nm and crystal.pump_wavelength_nm disagree");

  sc.geom = HomGeometry<double>{make_grid(cfg.numerics.detection_samples,
                                          cfg.numerics.detection_samples, window, window),
                                cfg.detectors.plane_z_mm * 1e-3, k_sum};
  validate(sc.geom);

  sc.crystal = CrystalSpec<double>{cfg.crystal.L_mm * 1e-3, k_pump, cfg.crystal.thin_crystal};
  validate(sc.crystal);
  sc.use_phi_route = cfg.numerics.use_phi_route;
  return sc;
}

ScanConfig<double> build_scan_config(const RunConfig& cfg) {
  ScanConfig<double> scan;
  scan.scenario = build_scenario(cfg);
  const auto& d = cfg.delay_scan;
  if (d.steps < 1) throw ValidationError("config: delay_scan.steps must be >= 1");
  if (d.steps > 1 && !(d.max_um > d.min_um))
    throw ValidationError("config: delay_scan.max_um must exceed min_um");
  for (int i = 0; i < d.steps; ++i) {
    const double frac = d.steps == 1 ? 0.0 : double(i) / (d.steps - 1);
    scan.delays.push_back((d.min_um + frac * (d.max_um - d.min_um)) * 1e-6);
  }
  if (cfg.noise) {
    if (!(cfg.noise->mean_counts > 0))
      throw ValidationError("config: noise.mean_counts must be positive");
    scan.noise = NoiseSpec<double>{cfg.noise->mean_counts, cfg.noise->seed};
  }
  return scan;
}

}  // namespace homsim
