#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

#include "homsim/field.hpp"
#include "homsim/grid.hpp"

namespace homsim {

/// Conjugate (transverse-wavevector) grid for a spatial grid: same sample
/// count per axis, extent equal to the Nyquist wavenumber pi/spacing.
template <typename Scalar>
Grid2D<Scalar> conjugate_grid(const Grid2D<Scalar>& g) {
  return Grid2D<Scalar>{g.nx, g.ny, std::numbers::pi_v<Scalar> / g.dx(),
                        std::numbers::pi_v<Scalar> / g.dy()};
}

namespace detail {

// Quadrature-weighted transform kernel K(a, i) = exp(sign*i*to_a*from_i) * w_i.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> transform_kernel(
    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& from_coords,
    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& to_coords, Scalar sign) {
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> k(to_coords.size(),
                                                                        from_coords.size());
  const Scalar spacing = from_coords[1] - from_coords[0];
  const auto w = trapezoid_weights<Scalar>(from_coords.size(), spacing);
  for (Eigen::Index a = 0; a < to_coords.size(); ++a)
    for (Eigen::Index i = 0; i < from_coords.size(); ++i)
      k(a, i) = std::polar(w[i], sign * to_coords[a] * from_coords[i]);
  return k;
}

template <typename Scalar>
ComplexField2D<Scalar> fourier_quadrature(const ComplexField2D<Scalar>& f,
                                          const Grid2D<Scalar>& out_grid, Scalar sign) {
  using Complex = std::complex<Scalar>;
  const auto kx = transform_kernel<Scalar>(f.grid.xs(), out_grid.xs(), sign);
  const auto ky = transform_kernel<Scalar>(f.grid.ys(), out_grid.ys(), sign);
  const Scalar scale = 1 / (2 * std::numbers::pi_v<Scalar>);
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> m =
      kx * f.values.matrix() * ky.transpose();
  return ComplexField2D<Scalar>{out_grid, (m.array() * scale).eval()};
}

}  // namespace detail

/// Angular spectrum of a transverse field: forward Fourier transform with
/// kernel exp(-i q.rho) and symmetric 1/(2 pi) split, evaluated by composite
/// trapezoid quadrature onto a wavevector grid. Preserves total power
/// (Parseval) within quadrature accuracy.
template <typename Scalar>
ComplexField2D<Scalar> angular_spectrum(const ComplexField2D<Scalar>& f,
                                        const Grid2D<Scalar>& spectral_grid) {
  return detail::fourier_quadrature(f, spectral_grid, Scalar(-1));
}

template <typename Scalar>
ComplexField2D<Scalar> angular_spectrum(const ComplexField2D<Scalar>& f) {
  return angular_spectrum(f, conjugate_grid(f.grid));
}

/// Inverse of angular_spectrum: synthesis with kernel exp(+i q.rho).
template <typename Scalar>
ComplexField2D<Scalar> synthesize(const ComplexField2D<Scalar>& spectrum,
                                  const Grid2D<Scalar>& spatial_grid) {
  return detail::fourier_quadrature(spectrum, spatial_grid, Scalar(+1));
}

}  // namespace homsim
