#include "homsim/verify.hpp"

#include <cmath>

namespace homsim {

VerifyReport run_verification(const RunConfig& cfg) {
  auto scenario = build_scenario(cfg);
  if (cfg.numerics.oracle_samples < 2)
    throw ValidationError("config: numerics.oracle_samples must be >= 2");
  if (cfg.numerics.oracle_samples > 32)
    throw ResourceLimitError("verify: oracle grid exceeds the 32^4 pair cap");

  const auto& window = scenario.pump_grid;
  HomGeometry<double> geom{make_grid(Eigen::Index(cfg.numerics.oracle_samples),
                                     Eigen::Index(cfg.numerics.oracle_samples), window.extent_x,
                                     window.extent_y),
                           scenario.geom.plane_z, scenario.geom.k_sum};

  const double lc = coherence_length(scenario.det1);
  const double t = scenario.bs.t, r = scenario.bs.r;
  const double law_mod = 2 * t * t * r * r / (t * t * t * t + r * r * r * r);

  VerifyReport report;
  auto push = [&report](const std::string& name, double value, double reference) {
    const double dev = std::abs(value - reference);
    report.entries.push_back({name, value, reference, dev});
    report.max_deviation = std::max(report.max_deviation, dev);
  };

  const struct {
    const char* pump_name;
    int m, n;
    double parity;
  } pumps[] = {{"hg10", 1, 0, +1.0}, {"hg01", 0, 1, -1.0}};
  const struct {
    const char* pol_name;
    PolarizationKind kind;
    double sign;
  } pols[] = {{"sym", PolarizationKind::symmetric_HH, +1.0},
              {"antisym", PolarizationKind::antisymmetric_singlet, -1.0}};

  for (const auto& pm : pumps) {
    PumpSpec<double> spec{scenario.pump.beam, {{pm.m, pm.n, {1.0, 0.0}}}, 0.0};
    const auto field = pump_field(spec, scenario.pump_grid);
    for (const auto& pl : pols) {
      const auto pol = make_polarization<double>(pl.kind);
      for (const double delay : {0.0, 10 * lc}) {
        const double fast = coincidence_rate(field, pol, scenario.bs, scenario.det1,
                                             scenario.det2, geom, delay, scenario.filter_shape);
        const double slow =
            coincidence_rate_oracle(field, pol, scenario.bs, scenario.det1, scenario.det2, geom,
                                    delay, scenario.filter_shape);
        const std::string tag = std::string(pm.pump_name) + "/" + pl.pol_name +
                                (delay == 0.0 ? "/zero-delay" : "/far-delay");
        push("oracle " + tag, fast, slow);
      }
      const double c0 = coincidence_rate(field, pol, scenario.bs, scenario.det1, scenario.det2,
                                         geom, 0.0, scenario.filter_shape);
      push("parity-law " + std::string(pm.pump_name) + "/" + pl.pol_name, c0,
           1.0 - pl.sign * pm.parity * law_mod);
    }
  }
  return report;
}

}  // namespace homsim
