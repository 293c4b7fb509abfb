// Acceptance suite: every criterion pinned at its stated tolerance, one
// printed pass/fail line per criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "homsim/cli.hpp"
#include "homsim/config.hpp"
#include "homsim/experiment.hpp"
#include "homsim/io.hpp"
#include "homsim/verify.hpp"

using namespace homsim;
using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix<Complex, 2, 2>;

namespace {

struct CriterionCheck {
  bool ok = true;
  void expect(bool condition) {
    ok = ok && condition;
    CHECK(condition);
  }
  void report(int number, const char* description) const {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", number, description);
    std::fflush(stdout);
  }
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::filesystem::path temp_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() / (std::string("homsim_accept_") + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("criterion 1: parity law on the 2x2 scenario matrix") {
  CriterionCheck c;
  const struct {
    const char* preset;
    double expected;
  } cases[] = {
      {"fig4_even", 0.0}, {"fig4_odd", 2.0}, {"fig5_even", 2.0}, {"fig5_odd", 0.0}};
  double max_dev = 0, slowest = 0;
  for (const auto& k : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sc = build_scenario(preset_config(k.preset));
    const auto pump = pump_field(sc.pump, sc.pump_grid);  // 128^2 pump window
    const double c0 =
        coincidence_rate(pump, sc.pol, sc.bs, sc.det1, sc.det2, sc.geom, 0.0, sc.filter_shape);
    const double dt = elapsed_s(t0);
    max_dev = std::max(max_dev, std::abs(c0 - k.expected));
    slowest = std::max(slowest, dt);
    c.expect(std::abs(c0 - k.expected) < 1e-6);
    c.expect(dt < 10.0);
  }
  std::printf("    C(0) max deviation %.3e, slowest scenario %.2f s\n", max_dev, slowest);
  c.report(1, "parity law C(0) = {0, 2, 2, 0} within 1e-6, < 10 s per scenario");
}

TEST_CASE("criterion 2: flat curve for the 45-degree superposition") {
  CriterionCheck c;
  const auto cfg = preset_config("fig6_superposition");
  const auto scan = build_scan_config(cfg);
  REQUIRE(scan.delays.size() == 41);
  const auto curve = run_scan(scan);
  double worst = 0;
  for (const double r : curve.rates) worst = std::max(worst, std::abs(r - 1.0));
  c.expect(worst < 1e-6);
  std::printf("    max |C(delay) - 1| = %.3e over %zu samples\n", worst, curve.rates.size());
  c.report(2, "45-degree superposition stays within 1e-6 of 1 across the scan");
}

TEST_CASE("criterion 3: factorized rate matches the 4D oracle on 16^4 grids") {
  CriterionCheck c;
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = preset_config("fig4_even");
  cfg.numerics.oracle_samples = 16;
  const auto report = run_verification(cfg);
  double max_dev = 0;
  int oracle_entries = 0;
  for (const auto& e : report.entries)
    if (e.name.rfind("oracle ", 0) == 0) {
      ++oracle_entries;
      max_dev = std::max(max_dev, e.deviation);
    }
  const double dt = elapsed_s(t0);
  c.expect(oracle_entries == 8);
  c.expect(max_dev < 1e-6);
  c.expect(dt < 300.0);
  std::printf("    8 combos, max |factorized - oracle| = %.3e, total %.1f s\n", max_dev, dt);
  c.report(3, "oracle equivalence within 1e-6 across 8 scenario/delay combos, < 5 min");
}

TEST_CASE("criterion 4: visibility contract") {
  CriterionCheck c;
  const auto dip = run_scan(build_scan_config(preset_config("fig4_even")));
  const auto peak = run_scan(build_scan_config(preset_config("fig4_odd")));
  const auto flat = run_scan(build_scan_config(preset_config("fig6_superposition")));
  const double v_dip = visibility(dip);
  const double v_peak = visibility(peak);
  const double v_flat = visibility(flat);
  c.expect(std::abs(v_dip - 1.0) < 1e-6);
  c.expect(std::abs(v_peak - 1.0) < 1e-6);
  c.expect(std::abs(v_flat) < 1e-6);
  std::printf("    V(dip) = %.9f, V(peak) = %.9f, V(flat) = %.3e\n", v_dip, v_peak, v_flat);
  c.report(4, "ideal dip and peak report V = 1, flat curve V = 0, all within 1e-6");
}

TEST_CASE("criterion 5: bosonic exchange symmetry on random scenario draws") {
  CriterionCheck c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto beam = make_free_space_beam(1.0e-3, 2 * std::numbers::pi / 351.0e-9);
  const HomGeometry<double> geom{make_grid(6, 6, 5.0e-3, 5.0e-3), 0.5,
                                 2 * (2 * std::numbers::pi / 702.0e-9)};
  double worst = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::vector<ModeTerm<double>> terms;
    double power = 0;
    for (int k = 0; k < 3; ++k) {
      ModeTerm<double> t{int(std::abs(u(rng)) * 3), int(std::abs(u(rng)) * 3),
                         Complex{u(rng), u(rng)}};
      power += std::norm(t.coeff);
      terms.push_back(t);
    }
    for (auto& t : terms) t.coeff /= std::sqrt(power);
    const auto pump =
        pump_field(PumpSpec<double>{beam, terms}, make_grid(65, 65, 5.0e-3, 5.0e-3));
    const double t_amp = 0.35 + 0.6 * std::abs(u(rng));
    const BeamSplitterSpec<double> bs{t_amp, std::sqrt(1 - t_amp * t_amp)};

    // Exchange-pure polarization draw: the amplitude matrix transposes with
    // the exchange sign s of the polarization state.
    PolarizationMatrix<double> pol;
    double sign;
    if (seed % 2 == 0) {
      Mat2 m;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = Complex{u(rng), u(rng)};
      pol = make_polarization<double>(PolarizationKind::custom, Mat2((m + m.transpose()) / 2.0));
      sign = 1.0;
    } else {
      Mat2 m = Mat2::Zero();
      const Complex phase = std::polar(1.0, u(rng) * std::numbers::pi);
      m(0, 1) = phase;
      m(1, 0) = -phase;
      pol = make_polarization<double>(PolarizationKind::custom, m);
      sign = -1.0;
    }

    const auto comps = biphoton_components(pump, pol, bs, geom);
    const Eigen::Index n = comps.tt.rows();
    double scale = 0, dev = 0;
    for (Eigen::Index p1 = 0; p1 < n; ++p1)
      for (Eigen::Index p2 = 0; p2 < n; ++p2)
        for (int s1 = 0; s1 < 2; ++s1)
          for (int s2 = 0; s2 < 2; ++s2) {
            const Complex direct = comps.psi_tt(p1, p2, s1, s2) + comps.psi_rr(p1, p2, s1, s2);
            const Complex exchanged =
                comps.psi_tt(p2, p1, s2, s1) + comps.psi_rr(p2, p1, s2, s1);
            scale = std::max(scale, std::abs(direct));
            dev = std::max(dev, std::abs(exchanged - sign * direct));
          }
    worst = std::max(worst, dev / scale);
    c.expect(dev <= 1e-10 * scale);
  }
  std::printf("    worst relative exchange deviation %.3e over 20 seeds\n", worst);
  c.report(5, "pointwise exchange symmetry of tt + rr holds to 1e-10 on 20 random draws");
}

TEST_CASE("criterion 6: mode-layer numerics") {
  CriterionCheck c;
  const double w = 0.1e-3;
  const auto beam = make_free_space_beam(w, 2 * std::numbers::pi / 351.0e-9);
  const auto grid = make_grid(128, 128, 5 * w, 5 * w);

  std::vector<ComplexField2D<double>> modes;
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n)
      modes.push_back(
          sample([&, m, n](double x, double y) { return hg_amplitude(m, n, beam, x, y); }, grid));
  double gram_dev = 0;
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = 0; b < modes.size(); ++b) {
      const double expected = (a == b) ? 1.0 : 0.0;
      gram_dev = std::max(gram_dev, std::abs(inner_product(modes[a], modes[b]) - expected));
    }
  c.expect(gram_dev < 1e-6);

  const auto p10 = pump_field(PumpSpec<double>{beam, {{1, 0, {1.0, 0.0}}}}, grid);
  const auto p01 = pump_field(PumpSpec<double>{beam, {{0, 1, {1.0, 0.0}}}}, grid);
  const Complex half{std::numbers::sqrt2 / 2, 0};
  const auto p45 = pump_field(PumpSpec<double>{beam, {{1, 0, half}, {0, 1, half}}}, grid);
  const double d10 = std::abs(parity_overlap_y(p10) - 1.0);
  const double d01 = std::abs(parity_overlap_y(p01) + 1.0);
  const double d45 = std::abs(parity_overlap_y(p45));
  c.expect(d10 < 1e-10);
  c.expect(d01 < 1e-10);
  c.expect(d45 < 1e-10);
  std::printf("    Gram deviation %.3e; parity deviations %.1e / %.1e / %.1e\n", gram_dev, d10,
              d01, d45);
  c.report(6, "HG orthonormality within 1e-6 and canonical parity overlaps within 1e-10");
}

TEST_CASE("criterion 7: two-photon spectrum normalization") {
  CriterionCheck c;
  const double w = 50.0e-6;
  const double k_pump = 2 * std::numbers::pi / 351.0e-9;
  const double sinc_width = 3.0 / w;
  const CrystalSpec<double> crystal{4 * k_pump / (sinc_width * sinc_width), k_pump, false};
  const auto v = sample(
      [&](double qx, double qy) {
        return Complex{w / std::sqrt(2 * std::numbers::pi) *
                           std::exp(-(qx * qx + qy * qy) * w * w / 4),
                       0};
      },
      make_grid(361, 361, 9.0 / w, 9.0 / w));

  const double i1 =
      phi_power_quadrature(v, crystal, make_grid(81, 81, 8.0 / w, 8.0 / w),
                           make_grid(81, 81, 8.0 / w, 8.0 / w));
  const double i2 =
      phi_power_quadrature(v, crystal, make_grid(161, 161, 8.0 / w, 8.0 / w),
                           make_grid(161, 161, 8.0 / w, 8.0 / w));
  c.expect(std::abs(i1 - 1.0) < 0.02);
  c.expect(std::abs(i2 - 1.0) < 0.02);
  c.expect(std::abs(i2 - 1.0) <= std::abs(i1 - 1.0) + 1e-9);
  std::printf("    quadrature = %.6f at default resolution, %.6f doubled\n", i1, i2);
  c.report(7, "4D quadrature of |Phi|^2 within 2% of 1 and converging with resolution");
}

TEST_CASE("criterion 8: generalized beam-splitter law") {
  CriterionCheck c;
  auto cfg = preset_config("fig4_even");
  cfg.numerics.oracle_samples = 16;
  const double t = std::sqrt(0.6);
  cfg.beamsplitter.t = t;
  cfg.beamsplitter.r = std::sqrt(1 - t * t);

  const auto sc = build_scenario(cfg);
  HomGeometry<double> geom{make_grid(16, 16, sc.pump_grid.extent_x, sc.pump_grid.extent_y),
                           sc.geom.plane_z, sc.geom.k_sum};
  const double mod = 0.48 / 0.52;

  double worst_law = 0, worst_oracle = 0;
  const struct {
    int m, n;
    double parity;
  } pumps[] = {{1, 0, +1.0}, {0, 1, -1.0}};
  for (const auto& pm : pumps) {
    const auto pump =
        pump_field(PumpSpec<double>{sc.pump.beam, {{pm.m, pm.n, {1.0, 0.0}}}}, sc.pump_grid);
    for (const double sign : {+1.0, -1.0}) {
      const auto pol = make_polarization<double>(sign > 0
                                                     ? PolarizationKind::symmetric_HH
                                                     : PolarizationKind::antisymmetric_singlet);
      const double expected = 1.0 - sign * pm.parity * mod;
      const double fast =
          coincidence_rate(pump, pol, sc.bs, sc.det1, sc.det2, geom, 0.0, sc.filter_shape);
      const double slow = coincidence_rate_oracle(pump, pol, sc.bs, sc.det1, sc.det2, geom, 0.0,
                                                  sc.filter_shape);
      worst_law = std::max(worst_law, std::abs(fast - expected));
      worst_oracle = std::max(worst_oracle, std::abs(fast - slow));
      c.expect(std::abs(fast - expected) < 1e-6);
      c.expect(std::abs(fast - slow) < 1e-6);
    }
  }
  std::printf("    law deviation %.3e, oracle deviation %.3e (t^2 = 0.6)\n", worst_law,
              worst_oracle);
  c.report(8, "C(0) = 1 - s P 0.48/0.52 at t^2 = 0.6, matching the oracle within 1e-6");
}

TEST_CASE("criterion 9: scan determinism") {
  CriterionCheck c;
  const auto dir = temp_dir("determinism");
  cli::CommonOptions opts;
  opts.preset = "fig4_even";
  opts.seed = 20240808;
  opts.basename = "run";

  opts.out_dir = (dir / "first").string();
  c.expect(cli::cmd_scan(opts) == cli::kExitOk);
  opts.out_dir = (dir / "second").string();
  c.expect(cli::cmd_scan(opts) == cli::kExitOk);

  const auto a = slurp((dir / "first" / "run.csv").string());
  const auto b = slurp((dir / "second" / "run.csv").string());
  c.expect(!a.empty());
  c.expect(a == b);
  std::printf("    CSV bodies of repeated seeded runs: %zu bytes, identical = %s\n", a.size(),
              a == b ? "yes" : "no");
  c.report(9, "repeated seeded scans produce byte-identical CSV bodies");
  std::filesystem::remove_all(dir);
}
