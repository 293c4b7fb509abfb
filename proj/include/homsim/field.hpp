#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "homsim/errors.hpp"
#include "homsim/grid.hpp"

namespace homsim {

/// Complex scalar field sampled on a Grid2D. values(ix, iy) is the amplitude
/// at node (x(ix), y(iy)). Values are immutable by convention once built; all
/// operations below are pure functions.
template <typename Scalar = double>
struct ComplexField2D {
  using Complex = std::complex<Scalar>;
  using Values = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  Grid2D<Scalar> grid;
  Values values;
};

/// Sample a pointwise function f(x, y) -> complex on every grid node.
/// Throws NumericGuardError identifying the node if f returns NaN/Inf.
template <typename Scalar, typename F>
ComplexField2D<Scalar> sample(F&& f, const Grid2D<Scalar>& grid) {
  ComplexField2D<Scalar> out{grid, typename ComplexField2D<Scalar>::Values(grid.nx, grid.ny)};
  for (Eigen::Index j = 0; j < grid.ny; ++j) {
    const Scalar y = grid.y(j);
    for (Eigen::Index i = 0; i < grid.nx; ++i) {
      const std::complex<Scalar> v = f(grid.x(i), y);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NumericGuardError("sample: non-finite value at node (" + std::to_string(i) + "," +
                                std::to_string(j) + ") = (" + std::to_string(grid.x(i)) + "," +
                                std::to_string(y) + ")");
      out.values(i, j) = v;
    }
  }
  return out;
}

template <typename Scalar>
void require_same_grid(const ComplexField2D<Scalar>& a, const ComplexField2D<Scalar>& b,
                       const char* who) {
  if (!(a.grid == b.grid)) throw ValidationError(std::string(who) + ": grid mismatch");
}

/// L2 inner product by composite trapezoid quadrature, conjugate-linear in the
/// first argument: sum conj(a) * b * w_x * w_y.
template <typename Scalar>
std::complex<Scalar> inner_product(const ComplexField2D<Scalar>& a,
                                   const ComplexField2D<Scalar>& b) {
  require_same_grid(a, b, "inner_product");
  const auto wx = trapezoid_weights<Scalar>(a.grid.nx, a.grid.dx());
  const auto wy = trapezoid_weights<Scalar>(a.grid.ny, a.grid.dy());
  std::complex<Scalar> acc{0, 0};
  for (Eigen::Index j = 0; j < a.grid.ny; ++j) {
    std::complex<Scalar> col{0, 0};
    for (Eigen::Index i = 0; i < a.grid.nx; ++i)
      col += std::conj(a.values(i, j)) * b.values(i, j) * wx[i];
    acc += col * wy[j];
  }
  return acc;
}

template <typename Scalar>
Scalar squared_norm(const ComplexField2D<Scalar>& f) {
  return inner_product(f, f).real();
}

/// Reflection about the y = 0 axis: out(x, y) = in(x, -y). A pure column
/// permutation on the symmetric node set, so it is an exact involution.
template <typename Scalar>
ComplexField2D<Scalar> flip_y(const ComplexField2D<Scalar>& f) {
  const auto& g = f.grid;
  for (Eigen::Index j = 0; j < g.ny / 2; ++j) {
    if (std::abs(g.y(j) + g.y(g.ny - 1 - j)) > Scalar(1e-12) * g.extent_y)
      throw ValidationError("flip_y: grid nodes are not symmetric about y = 0");
  }
  ComplexField2D<Scalar> out{g, f.values.rowwise().reverse()};
  return out;
}

/// Bilinear interpolation of a sampled field at an arbitrary point.
/// Throws NumericGuardError when the query leaves the grid window.
template <typename Scalar>
std::complex<Scalar> interpolate(const ComplexField2D<Scalar>& f, Scalar x, Scalar y) {
  const auto& g = f.grid;
  const Scalar eps_x = Scalar(1e-9) * g.dx();
  const Scalar eps_y = Scalar(1e-9) * g.dy();
  if (x < -g.extent_x - eps_x || x > g.extent_x + eps_x || y < -g.extent_y - eps_y ||
      y > g.extent_y + eps_y)
    throw NumericGuardError("interpolate: point (" + std::to_string(x) + "," + std::to_string(y) +
                            ") outside field window");
  Scalar fx = (x + g.extent_x) / g.dx();
  Scalar fy = (y + g.extent_y) / g.dy();
  Eigen::Index i = std::min<Eigen::Index>(g.nx - 2, std::max<Eigen::Index>(0, Eigen::Index(fx)));
  Eigen::Index j = std::min<Eigen::Index>(g.ny - 2, std::max<Eigen::Index>(0, Eigen::Index(fy)));
  const Scalar tx = std::min<Scalar>(1, std::max<Scalar>(0, fx - Scalar(i)));
  const Scalar ty = std::min<Scalar>(1, std::max<Scalar>(0, fy - Scalar(j)));
  return (1 - tx) * (1 - ty) * f.values(i, j) + tx * (1 - ty) * f.values(i + 1, j) +
         (1 - tx) * ty * f.values(i, j + 1) + tx * ty * f.values(i + 1, j + 1);
}

}  // namespace homsim
