#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/field.hpp"
#include "homsim/hermite.hpp"

namespace homsim {

/// Gaussian-beam parameters: waist w, Rayleigh range z_R, wavenumber k, and
/// the evaluation plane z (z = 0 is the focal plane, where the wavefront is
/// flat and the Gouy phase vanishes).
template <typename Scalar = double>
struct BeamSpec {
  Scalar waist{0};
  Scalar rayleigh_range{0};
  Scalar wavenumber{0};
  Scalar z{0};
};

template <typename Scalar>
void validate(const BeamSpec<Scalar>& b) {
  if (!(b.waist > 0) || !(b.rayleigh_range > 0) || !(b.wavenumber > 0))
    throw ValidationError("BeamSpec: waist, rayleigh_range and wavenumber must be positive");
}

/// True when z_R = k w^2 / 2 within 1e-9 relative, the free-space relation.
template <typename Scalar>
bool is_free_space_consistent(const BeamSpec<Scalar>& b) {
  const Scalar expected = b.wavenumber * b.waist * b.waist / 2;
  return std::abs(b.rayleigh_range - expected) <= Scalar(1e-9) * expected;
}

template <typename Scalar>
BeamSpec<Scalar> make_free_space_beam(Scalar waist, Scalar wavenumber, Scalar z = 0) {
  BeamSpec<Scalar> b{waist, wavenumber * waist * waist / 2, wavenumber, z};
  validate(b);
  return b;
}

/// One Hermite-Gaussian term of a pump superposition.
template <typename Scalar = double>
struct ModeTerm {
  int m{0};
  int n{0};
  std::complex<Scalar> coeff{0, 0};
};

/// Pump beam as a normalized superposition of HG modes, optionally with the
/// whole mode pattern rotated in the transverse plane (a tilted intracavity
/// wire selects the rotated first-order mode).
template <typename Scalar = double>
struct PumpSpec {
  BeamSpec<Scalar> beam;
  std::vector<ModeTerm<Scalar>> terms;
  Scalar rotation_rad{0};
};

template <typename Scalar>
void validate(const PumpSpec<Scalar>& p) {
  validate(p.beam);
  if (p.terms.empty()) throw ValidationError("PumpSpec: empty mode list");
  Scalar power = 0;
  for (const auto& t : p.terms) {
    if (t.m < 0 || t.n < 0) throw ValidationError("PumpSpec: negative mode index");
    power += std::norm(t.coeff);
  }
  if (std::abs(power - 1) > Scalar(1e-12))
    throw ValidationError("PumpSpec: mode coefficients not normalized, sum |c|^2 = " +
                          std::to_string(power));
}

/// Complex HG_mn amplitude at a transverse point. Normalization C_mn gives the
/// mode unit L2 norm over the infinite plane; the Gaussian envelope carries
/// the negative exponent -(x^2+y^2)/w^2. At z = 0 the wavefront-curvature
/// factor is replaced by its analytic limit (R infinite).
template <typename Scalar>
std::complex<Scalar> hg_amplitude(int m, int n, const BeamSpec<Scalar>& beam, Scalar x,
                                  Scalar y) {
  using Complex = std::complex<Scalar>;
  if (m < 0 || n < 0) throw ValidationError("hg_amplitude: negative mode index");
  validate(beam);
  const Scalar w = beam.waist;
  const Scalar sq2_over_w = std::numbers::sqrt2_v<Scalar> / w;

  Scalar log_fact = 0;  // log(2^(m+n) m! n!)
  for (int k = 2; k <= m; ++k) log_fact += std::log(Scalar(k));
  for (int k = 2; k <= n; ++k) log_fact += std::log(Scalar(k));
  log_fact += (m + n) * std::numbers::ln2_v<Scalar>;
  const Scalar norm_c =
      std::sqrt(2 / (std::numbers::pi_v<Scalar> * w * w)) * std::exp(-log_fact / 2);

  const Scalar r2 = x * x + y * y;
  const Scalar envelope = std::exp(-r2 / (w * w));
  const Scalar gouy = std::atan2(beam.z, beam.rayleigh_range);
  Scalar curvature_phase = 0;
  if (beam.z != 0) {
    const Scalar radius = (beam.z * beam.z + beam.rayleigh_range * beam.rayleigh_range) / beam.z;
    curvature_phase = -beam.wavenumber * r2 / (2 * radius);
  }
  const Complex phase = std::polar(Scalar(1), curvature_phase - Scalar(m + n + 1) * gouy);
  return norm_c * hermite(m, x * sq2_over_w) * hermite(n, y * sq2_over_w) * envelope * phase;
}

/// Pointwise pump amplitude: rotated-coordinate superposition of HG terms.
template <typename Scalar>
std::complex<Scalar> pump_amplitude(const PumpSpec<Scalar>& spec, Scalar x, Scalar y) {
  Scalar xr = x, yr = y;
  if (spec.rotation_rad != 0) {
    const Scalar c = std::cos(spec.rotation_rad), s = std::sin(spec.rotation_rad);
    xr = c * x + s * y;
    yr = -s * x + c * y;
  }
  std::complex<Scalar> acc{0, 0};
  for (const auto& t : spec.terms) acc += t.coeff * hg_amplitude(t.m, t.n, spec.beam, xr, yr);
  return acc;
}

/// Sample the pump superposition on a grid. The result has unit L2 norm up to
/// quadrature error when the window covers the mode tails.
template <typename Scalar>
ComplexField2D<Scalar> pump_field(const PumpSpec<Scalar>& spec, const Grid2D<Scalar>& grid) {
  validate(spec);
  return sample([&](Scalar x, Scalar y) { return pump_amplitude(spec, x, y); }, grid);
}

/// Normalized overlap of a field with its y-reflected copy,
/// P = <flip_y f, f> / <f, f>. P = +1 for even fields, -1 for odd fields, and
/// interior of the unit disk for mixtures.
template <typename Scalar>
std::complex<Scalar> parity_overlap_y(const ComplexField2D<Scalar>& f) {
  const Scalar n2 = squared_norm(f);
  if (!(n2 > 0)) throw NumericGuardError("parity_overlap_y: zero field");
  return inner_product(flip_y(f), f) / n2;
}

}  // namespace homsim
