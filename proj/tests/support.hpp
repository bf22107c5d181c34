#pragma once

// Grids and random band-limited fields shared by the tests.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "nsac/initial.hpp"
#include "nsac/operators.hpp"

namespace nsac::test {

inline constexpr double kPi = std::numbers::pi;

inline GridPtr torus(int n = 64) {
  GridSpec s;
  s.nx = n;
  s.ny = n;
  return build_grid(s);
}

inline GridPtr channel(int nx, int ny, double stretch = 0.0, double ly = 1.0) {
  GridSpec s;
  s.geometry = Geometry::Channel;
  s.nx = nx;
  s.ny = ny;
  s.ly = ly;
  s.wall_stretch = stretch;
  return build_grid(s);
}

/// Random trigonometric polynomial with |kx|, |ky| <= kmax (torus).
inline ScalarField random_field(const GridPtr& g, Rng& rng, int kmax = 4) {
  const double ax = 2 * kPi / g->spec().lx;
  const double ay = 2 * kPi / g->spec().ly;
  ScalarField f(g);
  for (int kx = -kmax; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) {
      if (ky == 0 && kx < 0) continue;
      const double scale = 1.0 / (1.0 + kx * kx + ky * ky);
      const double a = rng.normal() * scale;
      const double b = rng.normal() * scale;
      for (int j = 0; j < g->ny(); ++j) {
        for (int i = 0; i < g->nx(); ++i) {
          const double arg = ax * kx * g->x()[i] + ay * ky * g->y()[j];
          f(i, j) += a * std::cos(arg) + b * std::sin(arg);
        }
      }
    }
  }
  return f;
}

/// (-dy xi, dx xi) of a random streamfunction: divergence-free to rounding.
inline VectorField random_solenoidal(const GridPtr& g, Rng& rng, int kmax = 4) {
  const ScalarField xi = random_field(g, rng, kmax);
  VectorField u(derivative(xi, Axis::Y, 1), derivative(xi, Axis::X, 1));
  u.x *= -1.0;
  return u;
}

inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_diff(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

/// Fresh directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nsac_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace nsac::test
