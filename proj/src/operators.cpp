#include "nsac/operators.hpp"

#include <cmath>
#include <string>

#include "nsac/error.hpp"
#include "nsac/kernels.hpp"

namespace nsac {

namespace k = kernels::omp;

SpectralArray to_spectral(const ScalarField& f) {
  SpectralArray out(f.g().spectral_size());
  f.g().forward(f.values(), out);
  return out;
}

ScalarField from_spectral(const GridPtr& grid, const SpectralArray& coeffs) {
  ScalarField out(grid);
  grid->inverse(coeffs, out.values());
  return out;
}

void apply_y_derivative(const Grid& grid, std::span<const double> in, std::span<double> out,
                        int order, WallBc bc) {
  const YStencils& st = grid.y_stencils();
  const auto& rows = order == 1 ? (bc == WallBc::Neumann ? st.d1_neumann : st.d1_dirichlet)
                                : (bc == WallBc::Neumann ? st.d2_neumann : st.d2_dirichlet);
  k::apply_rows(rows, in, out, static_cast<std::size_t>(grid.nx()));
}

namespace {

void check_order(int order) {
  if (order != 1 && order != 2) {
    throw Error(ErrorKind::InvalidArgument,
                "derivative: order must be 1 or 2, got " + std::to_string(order));
  }
}

ScalarField spectral_derivative(const ScalarField& f, Axis axis, int order) {
  const Grid& g = f.g();
  auto c = to_spectral(f);
  const int nkx = g.nkx();
  if (order == 1) {
    k::scale_imaginary(c, axis == Axis::X ? g.ddx_factor() : g.ddy_factor());
  } else if (axis == Axis::X) {
    const auto kx2 = g.kx_squared_columns();
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= -kx2[n % nkx];
  } else {
    const auto ky = g.wavenumbers_y();
    for (std::size_t n = 0; n < c.size(); ++n) {
      const double kyv = ky[n / nkx];
      c[n] *= -kyv * kyv;
    }
  }
  return from_spectral(f.grid(), c);
}

}  // namespace

ScalarField derivative(const ScalarField& f, Axis axis, int order, WallBc bc) {
  check_order(order);
  const Grid& g = f.g();
  if (g.is_channel() && axis == Axis::Y) {
    ScalarField out(f.grid());
    apply_y_derivative(g, f.values(), out.values(), order, bc);
    return out;
  }
  return spectral_derivative(f, axis, order);
}

VectorField gradient(const ScalarField& f, WallBc bc) {
  return VectorField(derivative(f, Axis::X, 1, bc), derivative(f, Axis::Y, 1, bc));
}

ScalarField laplacian(const ScalarField& f, WallBc bc) {
  const Grid& g = f.g();
  if (g.is_torus()) {
    auto c = to_spectral(f);
    const auto k2 = g.k_squared();
    for (std::size_t n = 0; n < c.size(); ++n) c[n] *= -k2[n];
    return from_spectral(f.grid(), c);
  }
  return derivative(f, Axis::X, 2, bc) + derivative(f, Axis::Y, 2, bc);
}

ScalarField divergence(const VectorField& u, WallBc bc) {
  return derivative(u.x, Axis::X, 1, bc) + derivative(u.y, Axis::Y, 1, bc);
}

ScalarField curl(const VectorField& u, WallBc bc) {
  return derivative(u.y, Axis::X, 1, bc) - derivative(u.x, Axis::Y, 1, bc);
}

ScalarField gradient_magnitude(const VectorField& u, WallBc bc) {
  const VectorField gx = gradient(u.x, bc);
  const VectorField gy = gradient(u.y, bc);
  ScalarField out(u.grid());
  auto o = out.values();
  const auto a = gx.x.values();
  const auto b = gx.y.values();
  const auto c = gy.x.values();
  const auto d = gy.y.values();
  for (std::size_t n = 0; n < o.size(); ++n) {
    o[n] = std::sqrt(a[n] * a[n] + b[n] * b[n] + c[n] * c[n] + d[n] * d[n]);
  }
  return out;
}

ScalarField gradient_magnitude(const ScalarField& f, WallBc bc) {
  const VectorField gr = gradient(f, bc);
  ScalarField out(f.grid());
  auto o = out.values();
  const auto a = gr.x.values();
  const auto b = gr.y.values();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = std::hypot(a[n], b[n]);
  return out;
}

namespace {

void check_mean(const ScalarField& f, double mean, double tolerance, const char* what) {
  const double scale = 1.0 + k::max_abs(f.values());
  if (std::abs(mean) > tolerance * scale) {
    throw Error(ErrorKind::Solvability, std::string("invert_laplacian(") + what +
                                            "): input mean " + std::to_string(mean) +
                                            " exceeds solvability tolerance");
  }
}

ScalarField invert_torus(const ScalarField& f, double tolerance) {
  const Grid& g = f.g();
  const double area = g.spec().lx * g.spec().ly;
  check_mean(f, integral(f) / area, tolerance, "TorusZeroMean");
  auto c = to_spectral(f);
  const auto k2 = g.k_squared();
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = k2[n] > 0.0 ? -c[n] / k2[n] : Complex(0.0);
  return from_spectral(f.grid(), c);
}

ScalarField invert_channel(const ScalarField& f, PoissonBc bc, double tolerance) {
  const Grid& g = f.g();
  const int ny = g.ny();
  const int nkx = g.nkx();
  const bool neumann = bc == PoissonBc::NeumannZero;
  const double area = g.spec().lx * g.spec().ly;
  if (neumann) check_mean(f, integral(f) / area, tolerance, "NeumannZero");

  const YStencils& st = g.y_stencils();
  const auto& d2 = neumann ? st.d2_neumann : st.d2_dirichlet;
  std::vector<double> lower(ny, 0.0), diag(ny, 0.0), upper(ny, 0.0), scale(ny, 1.0);
  for (int j = 1; j + 1 < ny; ++j) {
    lower[j] = d2[j].weights[0];
    diag[j] = d2[j].weights[1];
    upper[j] = d2[j].weights[2];
  }
  if (neumann) {
    diag[0] = d2[0].weights[0];
    upper[0] = d2[0].weights[1];
    lower[ny - 1] = d2[ny - 1].weights[0];
    diag[ny - 1] = d2[ny - 1].weights[1];
  } else {
    diag[0] = diag[ny - 1] = 1.0;
    scale[0] = scale[ny - 1] = 0.0;
  }

  auto c = to_spectral(f);
  if (!neumann) {
    for (int col = 0; col < nkx; ++col) {
      c[col] = 0.0;
      c[static_cast<std::size_t>(ny - 1) * nkx + col] = 0.0;
    }
  }
  std::vector<double> shift(g.kx_squared_columns().begin(), g.kx_squared_columns().end());
  for (double& s : shift) s = -s;

  if (neumann) {
    // The kx = 0 column is singular: pin the first node, then remove the mean.
    std::vector<double> zero_diag = diag;
    std::vector<double> zero_upper = upper;
    zero_diag[0] = 1.0;
    zero_upper[0] = 0.0;
    std::vector<Complex> col0(ny);
    for (int j = 0; j < ny; ++j) col0[j] = c[static_cast<std::size_t>(j) * nkx];
    col0[0] = 0.0;
    const std::vector<double> no_shift{0.0};
    kernels::TridiagonalBatch sys0{lower, zero_diag, zero_upper, scale, no_shift};
    k::solve_tridiagonal(sys0, col0, 1);
    const auto wy = g.quadrature_weights_y();
    Complex mean = 0.0;
    for (int j = 0; j < ny; ++j) mean += wy[j] * col0[j];
    mean /= g.spec().ly;
    for (int j = 0; j < ny; ++j) col0[j] -= mean;

    SpectralArray rest = c;
    kernels::TridiagonalBatch sys{lower, diag, upper, scale, shift};
    // Column 0 is solved above; give it a nonsingular shift and a zero right-hand side here.
    for (int j = 0; j < ny; ++j) rest[static_cast<std::size_t>(j) * nkx] = 0.0;
    shift[0] = -1.0;
    k::solve_tridiagonal(sys, rest, static_cast<std::size_t>(nkx));
    for (int j = 0; j < ny; ++j) rest[static_cast<std::size_t>(j) * nkx] = col0[j];
    return from_spectral(f.grid(), rest);
  }

  kernels::TridiagonalBatch sys{lower, diag, upper, scale, shift};
  k::solve_tridiagonal(sys, c, static_cast<std::size_t>(nkx));
  return from_spectral(f.grid(), c);
}

}  // namespace

ScalarField invert_laplacian(const ScalarField& f, PoissonBc bc, double tolerance) {
  const Grid& g = f.g();
  if (g.is_torus() != (bc == PoissonBc::TorusZeroMean)) {
    throw Error(ErrorKind::UnsupportedGeometry,
                "invert_laplacian: boundary condition does not match the grid geometry");
  }
  if (g.is_torus()) return invert_torus(f, tolerance);
  return invert_channel(f, bc, tolerance);
}

void dealias_in_place(const Grid& grid, SpectralArray& coeffs) {
  k::scale(coeffs, grid.dealias_mask());
}

ScalarField dealias(const ScalarField& f) {
  auto c = to_spectral(f);
  dealias_in_place(f.g(), c);
  return from_spectral(f.grid(), c);
}

ScalarField product(const ScalarField& a, const ScalarField& b) {
  return dealias(pointwise(a, b));
}

}  // namespace nsac
