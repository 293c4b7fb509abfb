#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <future>
#include <numbers>
#include <thread>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/field.hpp"
#include "homsim/grid.hpp"

namespace homsim {

/// Nonlinear crystal parameters entering the two-photon angular spectrum.
/// thin_crystal forces the phase-matching factor to exactly 1.
template <typename Scalar = double>
struct CrystalSpec {
  Scalar length{0};
  Scalar pump_wavenumber{0};  // magnitude of the pump wave vector
  bool thin_crystal{false};
};

template <typename Scalar>
void validate(const CrystalSpec<Scalar>& c) {
  if (!(c.length > 0) || !(c.pump_wavenumber > 0))
    throw ValidationError("CrystalSpec: length and pump_wavenumber must be positive");
}

/// Two-photon polarization coefficients c(sigma_s, sigma_i) over the (H, V)
/// basis, normalized so sum |c|^2 = 1.
template <typename Scalar = double>
struct PolarizationMatrix {
  Eigen::Matrix<std::complex<Scalar>, 2, 2> c;
};

template <typename Scalar>
void validate(const PolarizationMatrix<Scalar>& p) {
  if (std::abs(p.c.squaredNorm() - 1) > Scalar(1e-12))
    throw ValidationError("PolarizationMatrix: coefficients not normalized");
}

enum class PolarizationKind { symmetric_HH, antisymmetric_singlet, custom };

/// Canonical polarization states: |HH> and the singlet (|HV> - |VH>)/sqrt(2),
/// or an arbitrary matrix normalized to unit power.
template <typename Scalar>
PolarizationMatrix<Scalar> make_polarization(
    PolarizationKind kind,
    const Eigen::Matrix<std::complex<Scalar>, 2, 2>& custom =
        Eigen::Matrix<std::complex<Scalar>, 2, 2>::Zero()) {
  using Complex = std::complex<Scalar>;
  PolarizationMatrix<Scalar> p;
  switch (kind) {
    case PolarizationKind::symmetric_HH:
      p.c << Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{0, 0};
      break;
    case PolarizationKind::antisymmetric_singlet: {
      const Scalar r = 1 / std::numbers::sqrt2_v<Scalar>;
      p.c << Complex{0, 0}, Complex{r, 0}, Complex{-r, 0}, Complex{0, 0};
      break;
    }
    case PolarizationKind::custom: {
      const Scalar n = std::sqrt(custom.squaredNorm());
      if (!(n > 0)) throw ValidationError("make_polarization: zero custom matrix");
      p.c = custom / n;
      break;
    }
  }
  return p;
}

/// Split a polarization matrix into exchange-symmetric and antisymmetric
/// parts, c = (c + c^T)/2 + (c - c^T)/2, with their squared-norm weights.
template <typename Scalar>
struct ExchangeParts {
  Eigen::Matrix<std::complex<Scalar>, 2, 2> sym;
  Eigen::Matrix<std::complex<Scalar>, 2, 2> antisym;
  Scalar weight_sym{0};
  Scalar weight_antisym{0};
};

template <typename Scalar>
ExchangeParts<Scalar> exchange_decompose(const PolarizationMatrix<Scalar>& p) {
  validate(p);
  ExchangeParts<Scalar> out;
  out.sym = (p.c + p.c.transpose()) / Scalar(2);
  out.antisym = (p.c - p.c.transpose()) / Scalar(2);
  out.weight_sym = out.sym.squaredNorm();
  out.weight_antisym = out.antisym.squaredNorm();
  return out;
}

/// Exchange overlap sum_ij c_ij conj(c_ji); real by construction, +1 for
/// purely symmetric and -1 for purely antisymmetric states. This is the
/// polarization factor entering the coincidence cross term.
template <typename Scalar>
Scalar exchange_overlap(const PolarizationMatrix<Scalar>& p) {
  std::complex<Scalar> acc{0, 0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) acc += p.c(i, j) * std::conj(p.c(j, i));
  return acc.real();
}

namespace detail {
template <typename Scalar>
Scalar sinc(Scalar u) {
  if (std::abs(u) < Scalar(1e-6)) return 1 - u * u / 6;
  return std::sin(u) / u;
}
}  // namespace detail

/// Two-photon angular spectrum
///   Phi(q_s, q_i) = (1/pi) sqrt(2 L / K) v(q_s + q_i)
///                   sinc(L |q_s - q_i|^2 / (4 K)),
/// with v the pump's sampled angular spectrum (bilinear-interpolated between
/// nodes). The prefactor is fixed so the 4D integral of |Phi|^2 is 1 for a
/// normalized v. thin_crystal replaces the sinc factor by exactly 1.
template <typename Scalar>
std::complex<Scalar> phi(Scalar qsx, Scalar qsy, Scalar qix, Scalar qiy,
                         const ComplexField2D<Scalar>& v, const CrystalSpec<Scalar>& crystal) {
  validate(crystal);
  const std::complex<Scalar> vq = interpolate(v, qsx + qix, qsy + qiy);
  Scalar factor = 1;
  if (!crystal.thin_crystal) {
    const Scalar dq2 = (qsx - qix) * (qsx - qix) + (qsy - qiy) * (qsy - qiy);
    factor = detail::sinc(crystal.length * dq2 / (4 * crystal.pump_wavenumber));
  }
  const Scalar pref = std::sqrt(2 * crystal.length / crystal.pump_wavenumber) /
                      std::numbers::pi_v<Scalar>;
  return pref * vq * factor;
}

/// Axis-aligned bounding box of the region where |v| >= rel_threshold * max|v|
/// (the window where the two-photon spectrum is appreciable).
template <typename Scalar>
struct SpectralWindow {
  Scalar x_min, x_max, y_min, y_max;
  bool contains(Scalar x, Scalar y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

template <typename Scalar>
SpectralWindow<Scalar> spectral_window(const ComplexField2D<Scalar>& v,
                                       Scalar rel_threshold = Scalar(1e-8)) {
  const Scalar cut = rel_threshold * v.values.abs().maxCoeff();
  const auto& g = v.grid;
  Eigen::Index ilo = g.nx, ihi = -1, jlo = g.ny, jhi = -1;
  for (Eigen::Index j = 0; j < g.ny; ++j)
    for (Eigen::Index i = 0; i < g.nx; ++i)
      if (std::abs(v.values(i, j)) >= cut) {
        ilo = std::min(ilo, i);
        ihi = std::max(ihi, i);
        jlo = std::min(jlo, j);
        jhi = std::max(jhi, j);
      }
  if (ihi < 0) throw NumericGuardError("spectral_window: zero spectrum");
  return SpectralWindow<Scalar>{g.x(ilo), g.x(ihi), g.y(jlo), g.y(jhi)};
}

/// 4D composite-trapezoid quadrature of |Phi|^2 over q_s, q_i in the given
/// grids, restricted to the window where v is appreciable. Partitioned over
/// hardware threads with a fixed summation order per partition.
template <typename Scalar>
Scalar phi_power_quadrature(const ComplexField2D<Scalar>& v, const CrystalSpec<Scalar>& crystal,
                            const Grid2D<Scalar>& qs_grid, const Grid2D<Scalar>& qi_grid) {
  validate(crystal);
  const auto window = spectral_window(v);
  const auto wsx = trapezoid_weights<Scalar>(qs_grid.nx, qs_grid.dx());
  const auto wsy = trapezoid_weights<Scalar>(qs_grid.ny, qs_grid.dy());
  const auto wix = trapezoid_weights<Scalar>(qi_grid.nx, qi_grid.dx());
  const auto wiy = trapezoid_weights<Scalar>(qi_grid.ny, qi_grid.dy());

  const Scalar pref = std::sqrt(2 * crystal.length / crystal.pump_wavenumber) /
                      std::numbers::pi_v<Scalar>;
  const Scalar pref2 = pref * pref;
  const Scalar a = crystal.length / (4 * crystal.pump_wavenumber);

  auto chunk = [&](Eigen::Index isx_begin, Eigen::Index isx_end) {
    Scalar acc = 0;
    for (Eigen::Index isx = isx_begin; isx < isx_end; ++isx) {
      const Scalar qsx = qs_grid.x(isx);
      for (Eigen::Index isy = 0; isy < qs_grid.ny; ++isy) {
        const Scalar qsy = qs_grid.y(isy);
        const Scalar ws = wsx[isx] * wsy[isy];
        Scalar inner = 0;
        for (Eigen::Index iix = 0; iix < qi_grid.nx; ++iix) {
          const Scalar qix = qi_grid.x(iix);
          const Scalar Qx = qsx + qix;
          if (Qx < window.x_min || Qx > window.x_max) continue;
          const Scalar dqx2 = (qsx - qix) * (qsx - qix);
          for (Eigen::Index iiy = 0; iiy < qi_grid.ny; ++iiy) {
            const Scalar qiy = qi_grid.y(iiy);
            const Scalar Qy = qsy + qiy;
            if (Qy < window.y_min || Qy > window.y_max) continue;
            const std::complex<Scalar> vq = interpolate(v, Qx, Qy);
            Scalar factor = 1;
            if (!crystal.thin_crystal) {
              const Scalar dq2 = dqx2 + (qsy - qiy) * (qsy - qiy);
              factor = detail::sinc(a * dq2);
            }
            inner += std::norm(vq) * factor * factor * wix[iix] * wiy[iiy];
          }
        }
        acc += ws * inner;
      }
    }
    return acc;
  };

  const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<Scalar>> parts;
  const Eigen::Index step = (qs_grid.nx + n_threads - 1) / n_threads;
  for (Eigen::Index begin = 0; begin < qs_grid.nx; begin += step)
    parts.push_back(std::async(std::launch::async, chunk, begin,
                               std::min(qs_grid.nx, begin + step)));
  Scalar total = 0;
  for (auto& p : parts) total += p.get();
  return pref2 * total;
}

}  // namespace homsim
