#pragma once

#include <Eigen/Dense>

#include <string>

#include "homsim/errors.hpp"

namespace homsim {

/// Uniform rectangular grid on [-extent_x, extent_x] x [-extent_y, extent_y],
/// endpoints included, centered at the origin. Node coordinates are computed
/// as (i - (n-1)/2)*spacing so the node set is an exact mirror image of itself
/// about both axes, which keeps parity operations bit-exact.
template <typename Scalar = double>
struct Grid2D {
  Eigen::Index nx{0};
  Eigen::Index ny{0};
  Scalar extent_x{0};
  Scalar extent_y{0};

  Scalar dx() const { return 2 * extent_x / Scalar(nx - 1); }
  Scalar dy() const { return 2 * extent_y / Scalar(ny - 1); }

  Scalar x(Eigen::Index i) const { return (Scalar(i) - Scalar(nx - 1) / 2) * dx(); }
  Scalar y(Eigen::Index j) const { return (Scalar(j) - Scalar(ny - 1) / 2) * dy(); }

  Eigen::Array<Scalar, Eigen::Dynamic, 1> xs() const {
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out(nx);
    for (Eigen::Index i = 0; i < nx; ++i) out[i] = x(i);
    return out;
  }
  Eigen::Array<Scalar, Eigen::Dynamic, 1> ys() const {
    Eigen::Array<Scalar, Eigen::Dynamic, 1> out(ny);
    for (Eigen::Index j = 0; j < ny; ++j) out[j] = y(j);
    return out;
  }

  bool operator==(const Grid2D&) const = default;
};

template <typename Scalar>
Grid2D<Scalar> make_grid(Eigen::Index nx, Eigen::Index ny, Scalar extent_x, Scalar extent_y) {
  if (nx < 2 || ny < 2)
    throw ValidationError("make_grid: sample counts must be >= 2, got " + std::to_string(nx) +
                          "x" + std::to_string(ny));
  if (!(extent_x > 0) || !(extent_y > 0))
    throw ValidationError("make_grid: extents must be positive");
  return Grid2D<Scalar>{nx, ny, extent_x, extent_y};
}

inline Grid2D<double> make_grid(Eigen::Index nx, Eigen::Index ny, double extent_x,
                                double extent_y) {
  return make_grid<double>(nx, ny, extent_x, extent_y);
}

/// Composite-trapezoid quadrature weights for one grid axis.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> trapezoid_weights(Eigen::Index n, Scalar spacing) {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> w =
      Eigen::Array<Scalar, Eigen::Dynamic, 1>::Constant(n, spacing);
  w[0] *= Scalar(0.5);
  w[n - 1] *= Scalar(0.5);
  return w;
}

}  // namespace homsim
