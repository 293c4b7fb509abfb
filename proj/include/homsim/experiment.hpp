#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/hom.hpp"
#include "homsim/modes.hpp"
#include "homsim/random.hpp"
#include "homsim/spdc.hpp"

namespace homsim {

/// One physical scenario: pump, polarization, beam splitter, detectors and
/// detection geometry, plus the crystal block for the spectral route.
template <typename Scalar = double>
struct Scenario {
  PumpSpec<Scalar> pump;
  Grid2D<Scalar> pump_grid;
  PolarizationMatrix<Scalar> pol;
  BeamSplitterSpec<Scalar> bs;
  DetectorSpec<Scalar> det1;
  DetectorSpec<Scalar> det2;
  HomGeometry<Scalar> geom;
  CrystalSpec<Scalar> crystal;
  FilterShape filter_shape{FilterShape::gaussian};
  bool use_phi_route{false};
};

template <typename Scalar = double>
struct NoiseSpec {
  Scalar mean_counts{0};
  std::uint64_t seed{0};
};

/// Delay-scan request: strictly increasing delays plus optional counting
/// noise.
template <typename Scalar = double>
struct ScanConfig {
  Scenario<Scalar> scenario;
  std::vector<Scalar> delays;
  std::optional<NoiseSpec<Scalar>> noise;
};

template <typename Scalar>
void validate(const ScanConfig<Scalar>& cfg) {
  if (cfg.delays.empty()) throw ValidationError("ScanConfig: empty delay list");
  for (std::size_t i = 1; i < cfg.delays.size(); ++i)
    if (!(cfg.delays[i] > cfg.delays[i - 1]))
      throw ValidationError("ScanConfig: delays must be strictly increasing");
  if (cfg.noise && !(cfg.noise->mean_counts > 0))
    throw ValidationError("ScanConfig: mean_counts must be positive");
}

/// Scan result: normalized rates per delay, optional Poisson counts, the
/// coherence length used for baseline classification, and a scenario echo.
template <typename Scalar = double>
struct CoincidenceCurve {
  std::vector<Scalar> delays;
  std::vector<Scalar> rates;
  std::vector<std::uint64_t> counts;  // empty unless noise was applied
  Scalar coherence_len{0};
  std::optional<NoiseSpec<Scalar>> noise;
  Scenario<Scalar> meta;
};

/// Draw Poisson counts with mean rate * mean_counts per sample, sequentially
/// and deterministically for the given seed.
template <typename Scalar>
CoincidenceCurve<Scalar> add_poisson_noise(CoincidenceCurve<Scalar> curve, Scalar mean_counts,
                                           std::uint64_t seed) {
  if (!(mean_counts > 0)) throw ValidationError("add_poisson_noise: mean_counts must be > 0");
  RandomSource rng(seed);
  curve.counts.clear();
  curve.counts.reserve(curve.rates.size());
  for (const Scalar rate : curve.rates) curve.counts.push_back(rng.poisson(rate * mean_counts));
  curve.noise = NoiseSpec<Scalar>{mean_counts, seed};
  return curve;
}

/// Run a delay scan. The scenario reduction is delay-independent, so it is
/// built once and evaluated at each delay; results are deterministic for a
/// fixed configuration including the noise seed.
template <typename Scalar>
CoincidenceCurve<Scalar> run_scan(const ScanConfig<Scalar>& cfg) {
  validate(cfg);
  const auto& sc = cfg.scenario;
  const auto pump = pump_field(sc.pump, sc.pump_grid);

  CoincidenceCurve<Scalar> curve;
  curve.delays = cfg.delays;
  curve.coherence_len = coherence_length(sc.det1);
  curve.meta = sc;
  curve.rates.reserve(cfg.delays.size());

  if (sc.use_phi_route) {
    for (const Scalar d : cfg.delays)
      curve.rates.push_back(coincidence_rate_phi_route(pump, sc.pol, sc.bs, sc.det1, sc.det2,
                                                       sc.geom, sc.crystal, d,
                                                       sc.filter_shape));
  } else {
    const auto red =
        make_coincidence_reduction(pump, sc.pol, sc.bs, sc.det1, sc.det2, sc.geom);
    for (const Scalar d : cfg.delays)
      curve.rates.push_back(red.rate(temporal_overlap(d, sc.det1, sc.filter_shape)));
  }

  if (cfg.noise) return add_poisson_noise(std::move(curve), cfg.noise->mean_counts,
                                          cfg.noise->seed);
  return curve;
}

/// Baseline-referenced visibility V = |C_baseline - C(0)| / C_baseline, with
/// the baseline averaged over samples at |delay| >= 5 l_c. Noisy curves are
/// evaluated on their counts (the mean-counts scale cancels in the ratio).
template <typename Scalar>
Scalar visibility(const CoincidenceCurve<Scalar>& curve) {
  if (curve.delays.size() != curve.rates.size() || curve.delays.empty())
    throw ValidationError("visibility: malformed curve");
  const Scalar lc = curve.coherence_len;
  if (!(lc > 0)) throw ValidationError("visibility: curve lacks a coherence length");

  const bool use_counts = !curve.counts.empty();
  std::ptrdiff_t zero_idx = -1;
  Scalar base_sum = 0;
  std::size_t base_n = 0;
  for (std::size_t i = 0; i < curve.delays.size(); ++i) {
    const Scalar d = curve.delays[i];
    if (std::abs(d) <= lc * Scalar(1e-12)) zero_idx = std::ptrdiff_t(i);
    if (std::abs(d) >= 5 * lc) {
      base_sum += use_counts ? Scalar(curve.counts[i]) : curve.rates[i];
      ++base_n;
    }
  }
  if (zero_idx < 0) throw ValidationError("visibility: curve lacks a zero-delay sample");
  if (base_n == 0)
    throw ValidationError("visibility: no baseline samples at |delay| >= 5 l_c");
  const Scalar baseline = base_sum / Scalar(base_n);
  if (!(baseline > 0)) throw NumericGuardError("visibility: zero baseline");
  const Scalar c0 = use_counts ? Scalar(curve.counts[std::size_t(zero_idx)])
                               : curve.rates[std::size_t(zero_idx)];
  return std::abs(baseline - c0) / baseline;
}

}  // namespace homsim
