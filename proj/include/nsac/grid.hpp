#pragma once

// Discrete geometry for the two supported domains.
//
// Torus:   [0, lx) x [0, ly), uniform nodes, Fourier in both axes.
// Channel: [0, lx) x [0, ly], periodic in x (Fourier), walls at y = 0 and
//          y = ly with nodes on both walls, finite differences in y.
//
// Physical arrays are row-major with shape (ny, nx): node (i, j) lives at
// index j * nx + i, x varying fastest.
//
// Spectral arrays have shape (rows, nx/2 + 1) with rows = ny. On the torus
// row j holds y-mode index j in FFTW order (0, 1, ..., ny/2, -ny/2+1, ..., -1).
// On the channel row j is the x-transform of physical row j. Forward
// transforms are unnormalized (coefficient = sum_x f(x) e^{-ik.x});
// the inverse applies 1/(nx*ny) on the torus and 1/nx on the channel, so
// inverse(forward(f)) == f to rounding.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nsac/kernels.hpp"

namespace nsac {

using Complex = std::complex<double>;

enum class Geometry { Torus, Channel };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);

struct GridSpec {
  Geometry geometry = Geometry::Torus;
  int nx = 64;
  int ny = 64;
  double lx = 6.283185307179586;
  double ly = 6.283185307179586;
  /// tanh clustering strength toward both walls; 0 means uniform (channel only).
  double wall_stretch = 0.0;

  /// Throws Error(InvalidArgument) naming the offending field.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Finite-difference stencils along y for the channel, one RowStencil per node.
struct YStencils {
  std::vector<kernels::RowStencil> d1_dirichlet;
  std::vector<kernels::RowStencil> d1_neumann;
  std::vector<kernels::RowStencil> d2_dirichlet;
  std::vector<kernels::RowStencil> d2_neumann;
};

/// Boundary tag for channel y-derivatives. Dirichlet fields use one-sided
/// stencils at the walls; Neumann fields have zero normal derivative there
/// and a mirrored second difference.
enum class WallBc { Dirichlet, Neumann };

class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const { return spec_; }
  Geometry geometry() const { return spec_.geometry; }
  bool is_torus() const { return spec_.geometry == Geometry::Torus; }
  bool is_channel() const { return spec_.geometry == Geometry::Channel; }

  int nx() const { return spec_.nx; }
  int ny() const { return spec_.ny; }
  std::size_t size() const { return static_cast<std::size_t>(spec_.nx) * spec_.ny; }
  int nkx() const { return spec_.nx / 2 + 1; }
  std::size_t spectral_size() const { return static_cast<std::size_t>(nkx()) * spec_.ny; }

  double dx() const { return spec_.lx / spec_.nx; }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  /// Spacing h_j = y_{j+1} - y_j (channel, ny-1 entries; torus, uniform dy).
  std::span<const double> y_spacing() const { return hy_; }

  /// Physical x-wavenumbers in full FFT order (nx entries).
  std::span<const double> wavenumbers_x() const { return kx_full_; }
  /// Physical y-wavenumbers in FFT order (torus only; empty for channel).
  std::span<const double> wavenumbers_y() const { return ky_; }
  /// Integer mode index along x of spectral column c (0..nx/2).
  int mode_x(int c) const { return c; }
  /// Integer mode index along y of spectral row r (torus only).
  int mode_y(int r) const;

  /// Per spectral element: 1 when retained by the 2/3 rule, 0 otherwise.
  std::span<const double> dealias_mask() const { return mask_; }
  /// i*kx multiplier (Nyquist zeroed) per spectral element, stored as the real factor.
  std::span<const double> ddx_factor() const { return ikx_; }
  /// i*ky multiplier per spectral element (torus only).
  std::span<const double> ddy_factor() const { return iky_; }
  /// |k|^2 per spectral element (kx^2 + ky^2 on the torus, kx^2 on the channel).
  std::span<const double> k_squared() const { return k2_; }
  /// kx^2 for each spectral column (nkx entries).
  std::span<const double> kx_squared_columns() const { return kx2_cols_; }

  /// Distance to the nearest wall for each y node (channel only).
  std::span<const double> wall_distance_y() const { return rho_y_; }
  /// Distance to the nearest wall at every node (channel only, size()).
  std::span<const double> wall_distance() const { return rho_; }

  /// Trapezoid quadrature weight for every node; sums to lx*ly.
  std::span<const double> quadrature_weights() const { return weights_; }
  /// Trapezoid weight per y node (without the dx factor).
  std::span<const double> quadrature_weights_y() const { return wy_; }

  const YStencils& y_stencils() const { return stencils_; }

  void forward(std::span<const double> physical, std::span<Complex> spectral) const;
  void inverse(std::span<const Complex> spectral, std::span<double> physical) const;

 private:
  void build_torus();
  void build_channel();

  GridSpec spec_;
  std::vector<double> x_, y_, hy_;
  std::vector<double> kx_full_, ky_;
  std::vector<double> mask_, ikx_, iky_, k2_, kx2_cols_;
  std::vector<double> rho_y_, rho_, weights_, wy_;
  YStencils stencils_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// build_grid: validates the spec and returns a shareable immutable grid.
GridPtr build_grid(const GridSpec& spec);

/// Fornberg finite-difference weights for derivative `order` at x0 from `nodes`.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

}  // namespace nsac
