#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <future>
#include <numbers>
#include <thread>
#include <utility>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/field.hpp"
#include "homsim/grid.hpp"
#include "homsim/spdc.hpp"
#include "homsim/spectrum.hpp"

namespace homsim {

/// Symmetric beam splitter with real amplitudes: transmission t, reflection r
/// (the reflected amplitude carries the factor i), t^2 + r^2 = 1.
template <typename Scalar = double>
struct BeamSplitterSpec {
  Scalar t{0};
  Scalar r{0};
};

template <typename Scalar>
void validate(const BeamSplitterSpec<Scalar>& bs) {
  if (bs.t < 0 || bs.t > 1 || bs.r < 0 || bs.r > 1)
    throw ValidationError("BeamSplitterSpec: t and r must lie in [0, 1]");
  if (std::abs(bs.t * bs.t + bs.r * bs.r - 1) > Scalar(1e-12))
    throw ValidationError("BeamSplitterSpec: t^2 + r^2 must equal 1");
}

template <typename Scalar>
BeamSplitterSpec<Scalar> balanced_beam_splitter() {
  const Scalar v = 1 / std::numbers::sqrt2_v<Scalar>;
  return BeamSplitterSpec<Scalar>{v, v};
}

enum class FilterShape { gaussian, rect_lambda };

/// Detector: collection aperture (full-grid by default, circular otherwise)
/// and the interference filter that sets the coherence length.
template <typename Scalar = double>
struct DetectorSpec {
  Scalar aperture_radius{0};
  Scalar center_x{0};
  Scalar center_y{0};
  Scalar filter_fwhm{0};
  Scalar filter_center{0};
  bool full_aperture{true};
};

template <typename Scalar>
void validate(const DetectorSpec<Scalar>& d) {
  if (!(d.aperture_radius > 0))
    throw ValidationError("DetectorSpec: aperture_radius must be positive");
  if (!(d.filter_fwhm > 0) || !(d.filter_center > 0))
    throw ValidationError("DetectorSpec: filter quantities must be positive");
}

/// Coherence length of the filtered biphoton envelope,
/// l_c = (2 ln 2 / pi) lambda0^2 / dlambda.
template <typename Scalar>
Scalar coherence_length(const DetectorSpec<Scalar>& d) {
  validate(d);
  return Scalar(2) * std::numbers::ln2_v<Scalar> / std::numbers::pi_v<Scalar> *
         d.filter_center * d.filter_center / d.filter_fwhm;
}

/// Indistinguishability envelope g(delay) multiplying the tt-rr cross term.
/// Gaussian filter: exp(-(delay/l_c)^2); rectangular spectral filter:
/// sinc(pi delay dlambda / lambda0^2). g(0) = 1 for both shapes.
template <typename Scalar>
Scalar temporal_overlap(Scalar delay, const DetectorSpec<Scalar>& d,
                        FilterShape shape = FilterShape::gaussian) {
  validate(d);
  if (shape == FilterShape::rect_lambda) {
    const Scalar u = std::numbers::pi_v<Scalar> * delay * d.filter_fwhm /
                     (d.filter_center * d.filter_center);
    return detail::sinc(u);
  }
  const Scalar x = delay / coherence_length(d);
  return std::exp(-x * x);
}

/// Beam-splitter transform of a pair of input angular spectra:
/// a_1 = t a_s + i r flip_y(a_i), a_2 = t a_i + i r flip_y(a_s).
/// The y-flip is the mirror reflection picked up on reflection.
template <typename Scalar>
std::pair<ComplexField2D<Scalar>, ComplexField2D<Scalar>> bs_transform_spectrum(
    const ComplexField2D<Scalar>& a_s, const ComplexField2D<Scalar>& a_i,
    const BeamSplitterSpec<Scalar>& bs) {
  using Complex = std::complex<Scalar>;
  validate(bs);
  require_same_grid(a_s, a_i, "bs_transform_spectrum");
  const Complex ir{0, bs.r};
  ComplexField2D<Scalar> a1{a_s.grid,
                            (bs.t * a_s.values + ir * flip_y(a_i).values).eval()};
  ComplexField2D<Scalar> a2{a_s.grid,
                            (bs.t * a_i.values + ir * flip_y(a_s).values).eval()};
  return {std::move(a1), std::move(a2)};
}

/// Detection-plane geometry shared by both output arms: per-photon grid, the
/// plane distance Z of the quadratic phase prefactors, and K = k_1 + k_2.
template <typename Scalar = double>
struct HomGeometry {
  Grid2D<Scalar> detection_grid;
  Scalar plane_z{0};
  Scalar k_sum{0};
};

template <typename Scalar>
void validate(const HomGeometry<Scalar>& g) {
  if (!(g.plane_z > 0) || !(g.k_sum > 0))
    throw ValidationError("HomGeometry: plane_z and k_sum must be positive");
}

namespace detail {

constexpr Eigen::Index kPairSampleCap = 32L * 32L;  // per-photon node cap (32^4 pairs)

// Quadrature weights masked by the detector aperture.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> detector_weights(
    const DetectorSpec<Scalar>& det, const Grid2D<Scalar>& grid) {
  validate(det);
  const auto wx = trapezoid_weights<Scalar>(grid.nx, grid.dx());
  const auto wy = trapezoid_weights<Scalar>(grid.ny, grid.dy());
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> w(grid.nx, grid.ny);
  if (!det.full_aperture) {
    if (std::abs(det.center_x) + det.aperture_radius > grid.extent_x * (1 + Scalar(1e-12)) ||
        std::abs(det.center_y) + det.aperture_radius > grid.extent_y * (1 + Scalar(1e-12)))
      throw ValidationError("DetectorSpec: aperture extends beyond the detection grid");
  }
  const Scalar r2 = det.aperture_radius * det.aperture_radius;
  for (Eigen::Index j = 0; j < grid.ny; ++j)
    for (Eigen::Index i = 0; i < grid.nx; ++i) {
      bool inside = true;
      if (!det.full_aperture) {
        const Scalar ddx = grid.x(i) - det.center_x;
        const Scalar ddy = grid.y(j) - det.center_y;
        inside = ddx * ddx + ddy * ddy <= r2;
      }
      w(i, j) = inside ? wx[i] * wy[j] : Scalar(0);
    }
  return w;
}

// Midpoint refinement of the detection grid: 2n-1 nodes per axis over the
// same extents, hitting every pairwise midpoint (x_i + x_j)/2 exactly.
template <typename Scalar>
Grid2D<Scalar> midpoint_grid(const Grid2D<Scalar>& g) {
  return Grid2D<Scalar>{2 * g.nx - 1, 2 * g.ny - 1, g.extent_x, g.extent_y};
}

// Pair-sum weight map Omega(a, b) = sum over node pairs with i1+i2 = a,
// j1+j2 = b of w1(i1,j1) w2(i2,j2) [diff_weight(i1-i2, j1-j2)], the aperture
// correlation that multiplies any function of the pair midpoint.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> build_omega(
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& w1,
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>& w2,
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>* diff_weight) {
  using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index nx = w1.rows(), ny = w1.cols();
  const Eigen::Index mx = 2 * nx - 1, my = 2 * ny - 1;

  ArrayXX omega = ArrayXX::Zero(mx, my);
  auto rows = [&](Eigen::Index a_begin, Eigen::Index a_end) {
    for (Eigen::Index a = a_begin; a < a_end; ++a) {
      const Eigen::Index i1_lo = std::max<Eigen::Index>(0, a - nx + 1);
      const Eigen::Index i1_hi = std::min<Eigen::Index>(nx - 1, a);
      for (Eigen::Index b = 0; b < my; ++b) {
        const Eigen::Index j1_lo = std::max<Eigen::Index>(0, b - ny + 1);
        const Eigen::Index j1_hi = std::min<Eigen::Index>(ny - 1, b);
        Scalar acc = 0;
        for (Eigen::Index i1 = i1_lo; i1 <= i1_hi; ++i1) {
          const Eigen::Index i2 = a - i1;
          for (Eigen::Index j1 = j1_lo; j1 <= j1_hi; ++j1) {
            const Eigen::Index j2 = b - j1;
            Scalar term = w1(i1, j1) * w2(i2, j2);
            if (diff_weight != nullptr)
              term *= (*diff_weight)((i1 - i2) + (nx - 1), (j1 - j2) + (ny - 1));
            acc += term;
          }
        }
        omega(a, b) = acc;
      }
    }
  };

  const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  if (mx < 64 || n_threads == 1) {
    rows(0, mx);
  } else {
    std::vector<std::future<void>> parts;
    const Eigen::Index step = (mx + n_threads - 1) / n_threads;
    for (Eigen::Index begin = 0; begin < mx; begin += step)
      parts.push_back(std::async(std::launch::async, rows, begin,
                                 std::min(mx, begin + step)));
    for (auto& p : parts) p.get();
  }
  return omega;
}

// Separable Omega for two full apertures without difference weighting.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> build_omega_full_aperture(
    const Grid2D<Scalar>& g) {
  const auto wx = trapezoid_weights<Scalar>(g.nx, g.dx());
  const auto wy = trapezoid_weights<Scalar>(g.ny, g.dy());
  Eigen::Array<Scalar, Eigen::Dynamic, 1> cx =
      Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(2 * g.nx - 1);
  Eigen::Array<Scalar, Eigen::Dynamic, 1> cy =
      Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(2 * g.ny - 1);
  for (Eigen::Index i1 = 0; i1 < g.nx; ++i1)
    for (Eigen::Index i2 = 0; i2 < g.nx; ++i2) cx[i1 + i2] += wx[i1] * wx[i2];
  for (Eigen::Index j1 = 0; j1 < g.ny; ++j1)
    for (Eigen::Index j2 = 0; j2 < g.ny; ++j2) cy[j1 + j2] += wy[j1] * wy[j2];
  return (cx.matrix() * cy.matrix().transpose()).array();
}

// Pump amplitude at a midpoint coordinate, with a coverage-specific error.
template <typename Scalar>
std::complex<Scalar> midpoint_lookup(const ComplexField2D<Scalar>& pump, Scalar x, Scalar y) {
  try {
    return interpolate(pump, x, y);
  } catch (const NumericGuardError&) {
    throw NumericGuardError(
        "biphoton: pump window does not cover the detection midpoints");
  }
}

// Pump amplitude at every midpoint node, bilinear-interpolated. Throws a
// coverage error when the detection window leaves the pump window.
template <typename Scalar>
Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> midpoint_pump(
    const ComplexField2D<Scalar>& pump, const Grid2D<Scalar>& midgrid) {
  Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> wm(midgrid.nx, midgrid.ny);
  for (Eigen::Index b = 0; b < midgrid.ny; ++b)
    for (Eigen::Index a = 0; a < midgrid.nx; ++a)
      wm(a, b) = midpoint_lookup(pump, midgrid.x(a), midgrid.y(b));
  return wm;
}

}  // namespace detail

/// The four biphoton amplitude components over detection-coordinate pairs,
/// stored as (nx*ny) x (nx*ny) arrays indexed by flattened nodes. Each array
/// carries its quadratic phase prefactor and t/r weight; the polarization
/// factors multiply per component:
///   Psi_tt(p1, s1; p2, s2) = tt(p1, p2) c(s1, s2)
///   Psi_rr(p1, s1; p2, s2) = rr(p1, p2) c(s2, s1)
///   Psi_tr(p1, s1; p2, s2) = tr(p1, p2) c(s1, s2) + tr(p2, p1) c(s2, s1)
/// and likewise for rt (both-photons-in-one-arm components).
template <typename Scalar = double>
struct BiphotonComponents {
  using Complex = std::complex<Scalar>;
  using PairArray = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  Grid2D<Scalar> grid;
  Scalar plane_z{0};
  Scalar k_sum{0};
  PolarizationMatrix<Scalar> pol;
  BeamSplitterSpec<Scalar> bs;
  PairArray tr, rt, tt, rr;

  Eigen::Index flat(Eigen::Index i, Eigen::Index j) const { return i * grid.ny + j; }

  Complex psi_tt(Eigen::Index p1, Eigen::Index p2, int s1, int s2) const {
    return tt(p1, p2) * pol.c(s1, s2);
  }
  Complex psi_rr(Eigen::Index p1, Eigen::Index p2, int s1, int s2) const {
    return rr(p1, p2) * pol.c(s2, s1);
  }
  Complex psi_tr(Eigen::Index p1, Eigen::Index p2, int s1, int s2) const {
    return tr(p1, p2) * pol.c(s1, s2) + tr(p2, p1) * pol.c(s2, s1);
  }
  Complex psi_rt(Eigen::Index p1, Eigen::Index p2, int s1, int s2) const {
    return rt(p1, p2) * pol.c(s1, s2) + rt(p2, p1) * pol.c(s2, s1);
  }
};

/// Materialize the four components on a (small) detection grid. The pump must
/// be sampled at the detection plane and cover every pairwise midpoint.
template <typename Scalar>
BiphotonComponents<Scalar> biphoton_components(const ComplexField2D<Scalar>& pump,
                                               const PolarizationMatrix<Scalar>& pol,
                                               const BeamSplitterSpec<Scalar>& bs,
                                               const HomGeometry<Scalar>& geom) {
  using Complex = std::complex<Scalar>;
  validate(pol);
  validate(bs);
  validate(geom);
  const auto& g = geom.detection_grid;
  const Eigen::Index n = g.nx * g.ny;
  if (n > detail::kPairSampleCap)
    throw ResourceLimitError("biphoton_components: grid exceeds the 32^4 pair cap");

  BiphotonComponents<Scalar> out{g, geom.plane_z, geom.k_sum, pol, bs, {}, {}, {}, {}};
  out.tt.resize(n, n);
  out.rr.resize(n, n);
  out.tr.resize(n, n);
  out.rt.resize(n, n);

  const Scalar t2 = bs.t * bs.t;
  const Scalar r2 = bs.r * bs.r;
  const Complex itr = Complex{0, 1} * bs.t * bs.r;
  const Scalar phase_scale = geom.k_sum / (2 * geom.plane_z);

  for (Eigen::Index i1 = 0; i1 < g.nx; ++i1)
    for (Eigen::Index j1 = 0; j1 < g.ny; ++j1) {
      const Eigen::Index p1 = out.flat(i1, j1);
      const Scalar x1 = g.x(i1), y1 = g.y(j1);
      for (Eigen::Index i2 = 0; i2 < g.nx; ++i2)
        for (Eigen::Index j2 = 0; j2 < g.ny; ++j2) {
          const Eigen::Index p2 = out.flat(i2, j2);
          const Scalar x2 = g.x(i2), y2 = g.y(j2);
          const Scalar xbar = (x1 + x2) / 2, ybar = (y1 + y2) / 2;
          const Scalar dx = x1 - x2;

          const Complex phase_cross =
              std::polar(Scalar(1), phase_scale * (dx * dx + (y1 - y2) * (y1 - y2)));
          const Complex w_mid = detail::midpoint_lookup(pump, xbar, ybar);
          const Complex w_mid_flip = detail::midpoint_lookup(pump, xbar, -ybar);
          out.tt(p1, p2) = t2 * phase_cross * w_mid;
          out.rr(p1, p2) = -r2 * phase_cross * w_mid_flip;

          const Complex phase_same =
              std::polar(Scalar(1), phase_scale * (dx * dx + (y1 + y2) * (y1 + y2)));
          const Complex w_half_diff = detail::midpoint_lookup(pump, xbar, (-y1 + y2) / 2);
          out.tr(p1, p2) = itr * phase_same * w_half_diff;
          out.rt(p1, p2) = out.tr(p1, p2);
        }
    }
  return out;
}

/// Precomputed coincidence reduction: the three aperture-weighted midpoint
/// integrals that determine the normalized rate at every delay,
///   C(g) = 1 - g * 2 t^2 r^2 chi Re(S) / (t^4 Mtt + r^4 Mrr).
template <typename Scalar = double>
struct CoincidenceReduction {
  Scalar m_tt{0};
  Scalar m_rr{0};
  Scalar cross_re{0};
  Scalar chi{0};
  Scalar t{0};
  Scalar r{0};

  Scalar baseline() const {
    return t * t * t * t * m_tt + r * r * r * r * m_rr;
  }
  Scalar rate(Scalar g) const {
    const Scalar a = baseline();
    if (!(a > 0))
      throw NumericGuardError("coincidence_rate: zero baseline (degenerate configuration)");
    // clamp roundoff residue of an exact cancellation; rates are nonnegative
    return std::max(Scalar(0), 1 - g * 2 * t * t * r * r * chi * cross_re / a);
  }
};

template <typename Scalar>
CoincidenceReduction<Scalar> make_coincidence_reduction(
    const ComplexField2D<Scalar>& pump, const PolarizationMatrix<Scalar>& pol,
    const BeamSplitterSpec<Scalar>& bs, const DetectorSpec<Scalar>& det1,
    const DetectorSpec<Scalar>& det2, const HomGeometry<Scalar>& geom,
    const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>* diff_weight = nullptr) {
  validate(pol);
  validate(bs);
  validate(geom);
  const auto& g = geom.detection_grid;

  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> omega;
  if (det1.full_aperture && det2.full_aperture && diff_weight == nullptr) {
    validate(det1);
    validate(det2);
    omega = detail::build_omega_full_aperture(g);
  } else {
    const auto w1 = detail::detector_weights(det1, g);
    const auto w2 = detail::detector_weights(det2, g);
    omega = detail::build_omega(w1, w2, diff_weight);
  }

  const auto midgrid = detail::midpoint_grid(g);
  const auto wm = detail::midpoint_pump(pump, midgrid);

  const Eigen::Index my = midgrid.ny;
  Scalar m_tt = 0, m_rr = 0;
  std::complex<Scalar> s_cross{0, 0};
  for (Eigen::Index b = 0; b < my; ++b)
    for (Eigen::Index a = 0; a < midgrid.nx; ++a) {
      const std::complex<Scalar> w = wm(a, b);
      const std::complex<Scalar> w_flip = wm(a, my - 1 - b);
      m_tt += std::norm(w) * omega(a, b);
      m_rr += std::norm(w_flip) * omega(a, b);
      s_cross += w * std::conj(w_flip) * omega(a, b);
    }

  return CoincidenceReduction<Scalar>{m_tt, m_rr, s_cross.real(), exchange_overlap(pol), bs.t,
                                      bs.r};
}

/// Normalized coincidence rate at a path delay (factorized path). The
/// quadratic phase prefactors of the tt and rr components are identical and
/// cancel, so only the three midpoint reductions enter.
template <typename Scalar>
Scalar coincidence_rate(const ComplexField2D<Scalar>& pump, const PolarizationMatrix<Scalar>& pol,
                        const BeamSplitterSpec<Scalar>& bs, const DetectorSpec<Scalar>& det1,
                        const DetectorSpec<Scalar>& det2, const HomGeometry<Scalar>& geom,
                        Scalar delay, FilterShape shape = FilterShape::gaussian) {
  const auto red = make_coincidence_reduction(pump, pol, bs, det1, det2, geom);
  return red.rate(temporal_overlap(delay, det1, shape));
}

/// Brute-force verification path: materializes the biphoton components and
/// sums |Psi_tt + g Psi_rr|^2 + (1 - g^2) |Psi_rr|^2 with explicit phases and
/// polarization indices over the 4D detection grid, normalized by the
/// directly summed baseline.
template <typename Scalar>
Scalar coincidence_rate_oracle(const ComplexField2D<Scalar>& pump,
                               const PolarizationMatrix<Scalar>& pol,
                               const BeamSplitterSpec<Scalar>& bs,
                               const DetectorSpec<Scalar>& det1,
                               const DetectorSpec<Scalar>& det2,
                               const HomGeometry<Scalar>& geom, Scalar delay,
                               FilterShape shape = FilterShape::gaussian) {
  using Complex = std::complex<Scalar>;
  const auto comps = biphoton_components(pump, pol, bs, geom);
  const auto& g = geom.detection_grid;
  const auto w1 = detail::detector_weights(det1, g);
  const auto w2 = detail::detector_weights(det2, g);
  const Scalar gd = temporal_overlap(delay, det1, shape);

  Scalar rate_acc = 0, base_acc = 0;
  for (Eigen::Index i1 = 0; i1 < g.nx; ++i1)
    for (Eigen::Index j1 = 0; j1 < g.ny; ++j1) {
      const Eigen::Index p1 = comps.flat(i1, j1);
      for (Eigen::Index i2 = 0; i2 < g.nx; ++i2)
        for (Eigen::Index j2 = 0; j2 < g.ny; ++j2) {
          const Eigen::Index p2 = comps.flat(i2, j2);
          const Scalar w = w1(i1, j1) * w2(i2, j2);
          if (w == 0) continue;
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2) {
              const Complex att = comps.psi_tt(p1, p2, s1, s2);
              const Complex arr = comps.psi_rr(p1, p2, s1, s2);
              rate_acc += w * (std::norm(att + gd * arr) + (1 - gd * gd) * std::norm(arr));
              base_acc += w * (std::norm(att) + std::norm(arr));
            }
        }
    }
  if (!(base_acc > 0))
    throw NumericGuardError("coincidence_rate_oracle: zero baseline");
  return rate_acc / base_acc;
}

/// Blurred difference kernel of the full two-photon spectral route:
/// D(s) = (1/2pi) int d2Delta sinc(L Delta^2 / 4K) exp(-i Delta^2 Z / 2K)
///        exp(i Delta . s). In the thin-crystal limit |D| is constant and the
/// spectral route reduces to the detection-plane path.
template <typename Scalar>
ComplexField2D<Scalar> difference_kernel(const CrystalSpec<Scalar>& crystal,
                                         const HomGeometry<Scalar>& geom,
                                         const Grid2D<Scalar>& diff_grid,
                                         Eigen::Index max_samples = 1025) {
  using Complex = std::complex<Scalar>;
  validate(crystal);
  validate(geom);
  const Scalar a = crystal.length / (4 * crystal.pump_wavenumber);
  const Scalar c = geom.plane_z / (2 * geom.k_sum);
  const Scalar delta_max = 8 / std::sqrt(a);
  const Scalar s_max = std::max(diff_grid.extent_x, diff_grid.extent_y);
  // Sampling rule: resolve the fastest local phase 2 c Delta + s_max.
  const Scalar rate = 2 * c * delta_max + s_max;
  const Eigen::Index n_needed =
      Eigen::Index(std::ceil(2 * delta_max * rate / (std::numbers::pi_v<Scalar> / 2))) + 1;
  const Eigen::Index n = std::max<Eigen::Index>(65, n_needed | 1);
  if (n > max_samples)
    throw ResourceLimitError("difference_kernel: spectral route needs " + std::to_string(n) +
                             " samples per axis (cap " + std::to_string(max_samples) + ")");

  const auto dgrid = make_grid<Scalar>(n, n, delta_max, delta_max);
  const auto w = trapezoid_weights<Scalar>(n, dgrid.dx());

  // Two-stage contraction: M(dx_idx, sy) = sum_dy sinc(a(Dx^2+Dy^2))
  // exp(-i c Dy^2) exp(i Dy sy) w_dy, then contract over Dx per output sx.
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> m(n, diff_grid.ny);
  for (Eigen::Index ix = 0; ix < n; ++ix) {
    const Scalar dx2 = dgrid.x(ix) * dgrid.x(ix);
    for (Eigen::Index sy = 0; sy < diff_grid.ny; ++sy) {
      Complex acc{0, 0};
      for (Eigen::Index iy = 0; iy < n; ++iy) {
        const Scalar dy = dgrid.y(iy);
        const Scalar d2 = dx2 + dy * dy;
        acc += detail::sinc(a * d2) *
               std::polar(w[iy], -c * dy * dy + dy * diff_grid.y(sy));
      }
      m(ix, sy) = acc;
    }
  }
  ComplexField2D<Scalar> out{diff_grid,
                             typename ComplexField2D<Scalar>::Values(diff_grid.nx, diff_grid.ny)};
  const Scalar scale = 1 / (2 * std::numbers::pi_v<Scalar>);
  for (Eigen::Index sx = 0; sx < diff_grid.nx; ++sx) {
    for (Eigen::Index sy = 0; sy < diff_grid.ny; ++sy) {
      Complex acc{0, 0};
      for (Eigen::Index ix = 0; ix < n; ++ix)
        acc += m(ix, sy) * std::polar(w[ix], -c * dgrid.x(ix) * dgrid.x(ix) +
                                                 dgrid.x(ix) * diff_grid.x(sx));
      out.values(sx, sy) = scale * acc;
    }
  }
  return out;
}

/// Coincidence rate through the full two-photon spectral route: the pair
/// amplitude factorizes into (midpoint pump synthesized from its angular
/// spectrum) x (difference kernel), so the same midpoint reduction applies
/// with |D|^2 as a pair-difference weight. Cross-validates the thin-crystal
/// detection-plane path at small L.
template <typename Scalar>
Scalar coincidence_rate_phi_route(const ComplexField2D<Scalar>& pump,
                                  const PolarizationMatrix<Scalar>& pol,
                                  const BeamSplitterSpec<Scalar>& bs,
                                  const DetectorSpec<Scalar>& det1,
                                  const DetectorSpec<Scalar>& det2,
                                  const HomGeometry<Scalar>& geom,
                                  const CrystalSpec<Scalar>& crystal, Scalar delay,
                                  FilterShape shape = FilterShape::gaussian) {
  const auto& g = geom.detection_grid;
  if (g.nx * g.ny > detail::kPairSampleCap)
    throw ResourceLimitError("phi route: grid exceeds the 32^4 pair cap");
  const auto midgrid = detail::midpoint_grid(g);

  // Midpoint pump via its angular spectrum (round trip through v).
  const auto v = angular_spectrum(pump);
  const auto wmid_field = synthesize(v, midgrid);

  // Pair-difference weight |D|^2 on the half-difference grid.
  const auto dk = difference_kernel(crystal, geom, midgrid);
  const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> diff_w =
      dk.values.abs2();

  const auto w1 = detail::detector_weights(det1, g);
  const auto w2 = detail::detector_weights(det2, g);
  const auto omega = detail::build_omega(w1, w2, &diff_w);

  Scalar m_tt = 0, m_rr = 0;
  std::complex<Scalar> s_cross{0, 0};
  for (Eigen::Index b = 0; b < midgrid.ny; ++b)
    for (Eigen::Index a = 0; a < midgrid.nx; ++a) {
      const std::complex<Scalar> w = wmid_field.values(a, b);
      const std::complex<Scalar> w_flip = wmid_field.values(a, midgrid.ny - 1 - b);
      m_tt += std::norm(w) * omega(a, b);
      m_rr += std::norm(w_flip) * omega(a, b);
      s_cross += w * std::conj(w_flip) * omega(a, b);
    }
  CoincidenceReduction<Scalar> red{m_tt, m_rr, s_cross.real(), exchange_overlap(pol), bs.t,
                                   bs.r};
  return red.rate(temporal_overlap(delay, det1, shape));
}

}  // namespace homsim
