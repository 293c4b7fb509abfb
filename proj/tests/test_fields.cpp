#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "homsim/field.hpp"
#include "homsim/grid.hpp"
#include "homsim/spectrum.hpp"

using namespace homsim;
using Complex = std::complex<double>;

namespace {

constexpr double kWaist = 1.0e-3;

// Unit-norm Gaussian: closed-form L2 norm is exactly 1.
Complex unit_gaussian(double x, double y) {
  const double w = kWaist;
  return std::sqrt(2.0 / std::numbers::pi) / w * std::exp(-(x * x + y * y) / (w * w));
}

Grid2D<double> default_grid(Eigen::Index n = 128) {
  return make_grid(n, n, 5 * kWaist, 5 * kWaist);
}

}  // namespace

TEST_CASE("make_grid corner cases and spacing") {
  const auto g2 = make_grid(2, 2, 1.0, 1.0);
  CHECK(g2.x(0) == doctest::Approx(-1.0));
  CHECK(g2.x(1) == doctest::Approx(1.0));
  CHECK(g2.y(0) == doctest::Approx(-1.0));
  CHECK(g2.y(1) == doctest::Approx(1.0));

  const auto g3 = make_grid(3, 3, 1.0, 1.0);
  CHECK(g3.x(1) == 0.0);
  CHECK(g3.y(1) == 0.0);

  const double w = kWaist;
  const auto g = make_grid(64, 64, 5 * w, 5 * w);
  CHECK(g.dx() == doctest::Approx(10 * w / 63).epsilon(1e-15));

  CHECK_THROWS_AS(make_grid(1, 8, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_grid(8, 8, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(make_grid(8, 8, 1.0, -2.0), ValidationError);
}

TEST_CASE("grid nodes are exact mirror pairs") {
  for (Eigen::Index n : {4, 5, 64, 129}) {
    const auto g = make_grid(n, n, 3.0, 3.0);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(g.x(i) == -g.x(n - 1 - i));
  }
}

TEST_CASE("sample basics") {
  const auto g = make_grid(17, 17, 2.0, 2.0);
  const auto ones = sample([](double, double) { return Complex{1, 0}; }, g);
  CHECK(ones.values.abs().minCoeff() == 1.0);
  CHECK(ones.values.abs().maxCoeff() == 1.0);

  const auto fx = sample([](double x, double) { return Complex{x, 0}; }, g);
  for (Eigen::Index i = 0; i < g.nx; ++i)
    CHECK(fx.values(i, 3).real() == -fx.values(g.nx - 1 - i, 3).real());

  const auto gauss = sample(
      [](double x, double y) { return Complex{std::exp(-(x * x + y * y)), 0}; }, g);
  CHECK(gauss.values(8, 8).real() == 1.0);  // center node of odd grid

  CHECK_THROWS_AS(
      sample([](double x, double) { return Complex{1.0 / (x - x), 0}; }, g),
      NumericGuardError);
}

TEST_CASE("inner_product against closed-form Gaussian norm") {
  const auto f = sample(unit_gaussian, default_grid());
  CHECK(std::abs(inner_product(f, f).real() - 1.0) < 1e-6);
  CHECK(inner_product(f, f).imag() == doctest::Approx(0.0));

  const auto zero = sample([](double, double) { return Complex{0, 0}; }, default_grid());
  CHECK(std::abs(inner_product(f, zero)) == 0.0);

  const auto other = sample(unit_gaussian, make_grid(64, 64, 5 * kWaist, 5 * kWaist));
  CHECK_THROWS_AS(inner_product(f, other), ValidationError);
}

TEST_CASE("inner_product conjugate-linearity and positivity") {
  const auto g = default_grid(32);
  const auto a = sample([](double x, double y) { return Complex{x, y}; }, g);
  const auto b = sample([](double x, double y) { return Complex{y, -x}; }, g);
  const Complex lhs = inner_product(a, b);
  const auto a_scaled = ComplexField2D<double>{g, (a.values * Complex{0.0, 2.0}).eval()};
  CHECK(std::abs(inner_product(a_scaled, b) - std::conj(Complex{0.0, 2.0}) * lhs) < 1e-12);
  CHECK(inner_product(a, a).real() >= 0.0);
}

TEST_CASE("quadrature convergence for the Gaussian norm") {
  double prev = 1.0;
  for (Eigen::Index n : {8, 16, 32}) {
    const auto f = sample(unit_gaussian, default_grid(n));
    const double err = std::abs(inner_product(f, f).real() - 1.0);
    CHECK(err <= prev + 1e-13);  // roundoff floor once converged
    prev = err;
  }
  const auto f = sample(unit_gaussian, default_grid(128));
  CHECK(std::abs(inner_product(f, f).real() - 1.0) < 1e-6);
}

TEST_CASE("angular spectrum of a Gaussian matches the closed-form pair") {
  const double w = kWaist;
  const auto f = sample(unit_gaussian, default_grid());
  const auto v = angular_spectrum(f);
  // Oracle: v(q) = w/sqrt(2 pi) exp(-q^2 w^2 / 4)
  double max_err = 0;
  for (Eigen::Index j = 0; j < v.grid.ny; ++j)
    for (Eigen::Index i = 0; i < v.grid.nx; ++i) {
      const double q2 = v.grid.x(i) * v.grid.x(i) + v.grid.y(j) * v.grid.y(j);
      const double expected = w / std::sqrt(2 * std::numbers::pi) * std::exp(-q2 * w * w / 4);
      max_err = std::max(max_err, std::abs(v.values(i, j).real() - expected) +
                                      std::abs(v.values(i, j).imag()));
    }
  CHECK(max_err < 1e-6 * w);
}

TEST_CASE("Parseval identity between field and angular spectrum") {
  const auto f = sample(unit_gaussian, default_grid());
  const auto v = angular_spectrum(f);
  const double pf = squared_norm(f);
  const double pv = squared_norm(v);
  CHECK(std::abs(pv - pf) / pf < 1e-6);
}

TEST_CASE("shift theorem") {
  const auto g = default_grid(129);
  const double a = 2 * g.dx();  // on-grid shift keeps samples exact
  const auto f = sample(unit_gaussian, g);
  const auto fs = sample([&](double x, double y) { return unit_gaussian(x - a, y); }, g);
  const auto v = angular_spectrum(f);
  const auto vs = angular_spectrum(fs);
  double max_err = 0;
  const double scale = v.values.abs().maxCoeff();
  for (Eigen::Index j = 0; j < v.grid.ny; ++j)
    for (Eigen::Index i = 0; i < v.grid.nx; ++i) {
      const Complex phase = std::polar(1.0, -v.grid.x(i) * a);
      max_err = std::max(max_err, std::abs(vs.values(i, j) - phase * v.values(i, j)));
    }
  CHECK(max_err < 1e-6 * scale);
}

TEST_CASE("impulse has a flat-magnitude spectrum") {
  const auto g = make_grid(33, 33, 1.0, 1.0);
  ComplexField2D<double> f{g, ComplexField2D<double>::Values::Zero(g.nx, g.ny)};
  f.values(16, 16) = Complex{1, 0};
  const auto v = angular_spectrum(f);
  const auto mags = v.values.abs();
  CHECK(mags.maxCoeff() - mags.minCoeff() < 1e-12 * mags.maxCoeff());
}

TEST_CASE("synthesis inverts the angular spectrum") {
  const auto g = default_grid(96);
  const auto f = sample(
      [](double x, double y) {
        return unit_gaussian(x, y) * Complex{x / kWaist, 1 - y / kWaist};
      },
      g);
  const auto back = synthesize(angular_spectrum(f), g);
  const double scale = f.values.abs().maxCoeff();
  CHECK((back.values - f.values).abs().maxCoeff() < 1e-6 * scale);
}

TEST_CASE("flip_y is an exact involution and acts on parity eigenfields") {
  const auto g = make_grid(40, 40, 2.0, 2.0);  // even count: still a pure permutation
  const auto f = sample([](double x, double y) { return Complex{x + y * y, y * x}; }, g);
  const auto ff = flip_y(flip_y(f));
  CHECK((ff.values == f.values).all());

  const auto even = sample([](double x, double y) { return Complex{x * y * y, 0}; }, g);
  CHECK((flip_y(even).values == even.values).all());

  const auto odd = sample([](double x, double y) { return Complex{x * y, 0}; }, g);
  CHECK((flip_y(odd).values == (-odd.values)).all());
}

TEST_CASE("bilinear interpolation") {
  const auto g = make_grid(21, 21, 1.0, 1.0);
  const auto f = sample([](double x, double y) { return Complex{2 * x - y, x + y}; }, g);
  // exact on bilinear functions
  CHECK(std::abs(interpolate(f, 0.013, -0.41) - Complex{2 * 0.013 + 0.41, 0.013 - 0.41}) <
        1e-12);
  CHECK(std::abs(interpolate(f, 1.0, 1.0) - Complex{1.0, 2.0}) < 1e-12);
  CHECK_THROWS_AS(interpolate(f, 1.2, 0.0), NumericGuardError);
}

TEST_CASE("float instantiation compiles and runs") {
  const auto g = make_grid<float>(16, 16, 2.0f, 2.0f);
  const auto f = sample([](float x, float y) { return std::complex<float>{x * y, 0}; }, g);
  CHECK(std::isfinite(squared_norm(f)));
}
