#include "nsac/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "nsac/error.hpp"

namespace nsac {

namespace {

// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, "grid." + field + ": " + why);
}

bool retained(int mode, int n) { return 3 * std::abs(mode) < n; }

}  // namespace

std::string to_string(Geometry g) { return g == Geometry::Torus ? "torus" : "channel"; }

Geometry geometry_from_string(const std::string& name) {
  if (name == "torus" || name == "Torus") return Geometry::Torus;
  if (name == "channel" || name == "Channel") return Geometry::Channel;
  throw Error(ErrorKind::InvalidArgument, "grid.geometry: unknown geometry '" + name + "'");
}

void GridSpec::validate() const {
  require(nx >= 4, "nx", "must be >= 4, got " + std::to_string(nx));
  require(nx % 2 == 0, "nx", "must be even, got " + std::to_string(nx));
  require(ny >= 4, "ny", "must be >= 4, got " + std::to_string(ny));
  if (geometry == Geometry::Torus) {
    require(ny % 2 == 0, "ny", "must be even on the torus, got " + std::to_string(ny));
  }
  require(lx > 0.0 && std::isfinite(lx), "lx", "must be positive");
  require(ly > 0.0 && std::isfinite(ly), "ly", "must be positive");
  require(wall_stretch >= 0.0 && std::isfinite(wall_stretch), "wall_stretch",
          "must be non-negative");
  if (geometry == Geometry::Torus) {
    require(wall_stretch == 0.0, "wall_stretch", "only applies to the channel");
  }
}

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  // Fornberg (1988), recursive weights for arbitrarily spaced nodes.
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][order];
  return w;
}

struct Grid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

Grid::Grid(const GridSpec& spec) : spec_(spec), plans_(std::make_unique<Plans>()) {
  spec_.validate();
  const int nx = spec_.nx;
  const int ny = spec_.ny;
  const int nkx = this->nkx();

  x_.resize(nx);
  for (int i = 0; i < nx; ++i) x_[i] = i * spec_.lx / nx;

  const double kscale = 2.0 * std::numbers::pi / spec_.lx;
  kx_full_.resize(nx);
  for (int i = 0; i < nx; ++i) kx_full_[i] = kscale * (i <= nx / 2 - 1 ? i : i - nx);
  kx2_cols_.resize(nkx);
  for (int c = 0; c < nkx; ++c) kx2_cols_[c] = (kscale * c) * (kscale * c);

  if (is_torus()) {
    build_torus();
  } else {
    build_channel();
  }

  std::vector<double> in(size(), 0.0);
  std::vector<Complex> out(spectral_size());
  auto* cout = reinterpret_cast<fftw_complex*>(out.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  if (is_torus()) {
    plans_->forward = fftw_plan_dft_r2c_2d(ny, nx, in.data(), cout, flags);
    plans_->inverse = fftw_plan_dft_c2r_2d(ny, nx, cout, in.data(), flags);
  } else {
    int n[] = {nx};
    plans_->forward =
        fftw_plan_many_dft_r2c(1, n, ny, in.data(), nullptr, 1, nx, cout, nullptr, 1, nkx, flags);
    plans_->inverse =
        fftw_plan_many_dft_c2r(1, n, ny, cout, nullptr, 1, nkx, in.data(), nullptr, 1, nx, flags);
  }
  if (!plans_->forward || !plans_->inverse) {
    throw Error(ErrorKind::InvalidArgument, "grid: FFTW planning failed");
  }
}

Grid::~Grid() = default;

int Grid::mode_y(int r) const { return r <= spec_.ny / 2 ? r : r - spec_.ny; }

void Grid::build_torus() {
  const int nx = spec_.nx;
  const int ny = spec_.ny;
  const int nkx = this->nkx();
  const double dy = spec_.ly / ny;
  y_.resize(ny);
  for (int j = 0; j < ny; ++j) y_[j] = j * dy;
  hy_.assign(ny, dy);

  const double kxs = 2.0 * std::numbers::pi / spec_.lx;
  const double kys = 2.0 * std::numbers::pi / spec_.ly;
  ky_.resize(ny);
  for (int j = 0; j < ny; ++j) ky_[j] = kys * mode_y(j);

  const std::size_t ns = spectral_size();
  mask_.resize(ns);
  ikx_.resize(ns);
  iky_.resize(ns);
  k2_.resize(ns);
  for (int r = 0; r < ny; ++r) {
    const int my = mode_y(r);
    for (int c = 0; c < nkx; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * nkx + c;
      const double kx = kxs * c;
      const double ky = kys * my;
      mask_[idx] = (retained(c, nx) && retained(my, ny)) ? 1.0 : 0.0;
      ikx_[idx] = (2 * c == nx) ? 0.0 : kx;
      iky_[idx] = (2 * r == ny) ? 0.0 : ky;
      k2_[idx] = kx * kx + ky * ky;
    }
  }

  wy_.assign(ny, dy);
  weights_.assign(size(), spec_.lx / nx * dy);
}

void Grid::build_channel() {
  const int nx = spec_.nx;
  const int ny = spec_.ny;
  const int nkx = this->nkx();
  const double ly = spec_.ly;
  const double beta = spec_.wall_stretch;

  y_.resize(ny);
  for (int j = 0; j < ny; ++j) {
    const double s = static_cast<double>(j) / (ny - 1);
    if (beta > 0.0) {
      y_[j] = 0.5 * ly * (1.0 + std::tanh(beta * (2.0 * s - 1.0)) / std::tanh(beta));
    } else {
      y_[j] = s * ly;
    }
  }
  y_.front() = 0.0;
  y_.back() = ly;
  // Symmetrize so both walls see identical spacing.
  for (int j = 0; j < ny / 2; ++j) {
    const double d = 0.5 * (y_[j] + (ly - y_[ny - 1 - j]));
    y_[j] = d;
    y_[ny - 1 - j] = ly - d;
  }
  if (ny % 2 == 1) y_[ny / 2] = 0.5 * ly;

  hy_.resize(ny - 1);
  for (int j = 0; j + 1 < ny; ++j) hy_[j] = y_[j + 1] - y_[j];

  const std::size_t ns = spectral_size();
  mask_.resize(ns);
  ikx_.resize(ns);
  k2_.resize(ns);
  const double kxs = 2.0 * std::numbers::pi / spec_.lx;
  for (int r = 0; r < ny; ++r) {
    for (int c = 0; c < nkx; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * nkx + c;
      const double kx = kxs * c;
      mask_[idx] = retained(c, nx) ? 1.0 : 0.0;
      ikx_[idx] = (2 * c == nx) ? 0.0 : kx;
      k2_[idx] = kx * kx;
    }
  }

  rho_y_.resize(ny);
  for (int j = 0; j < ny; ++j) rho_y_[j] = std::min(y_[j], ly - y_[j]);
  rho_y_.front() = 0.0;
  rho_y_.back() = 0.0;
  rho_.resize(size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) rho_[static_cast<std::size_t>(j) * nx + i] = rho_y_[j];
  }

  wy_.assign(ny, 0.0);
  for (int j = 0; j + 1 < ny; ++j) {
    wy_[j] += 0.5 * hy_[j];
    wy_[j + 1] += 0.5 * hy_[j];
  }
  weights_.resize(size());
  const double dx = spec_.lx / nx;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) weights_[static_cast<std::size_t>(j) * nx + i] = wy_[j] * dx;
  }

  auto make = [&](int first, int width, int at, int order) {
    kernels::RowStencil s;
    s.first = first;
    s.width = width;
    s.difference = true;
    auto w = fd_weights(y_[at], std::span<const double>(y_.data() + first, width), order);
    for (int k = 0; k < width; ++k) s.weights[k] = w[k];
    return s;
  };
  auto& st = stencils_;
  st.d1_dirichlet.resize(ny);
  st.d1_neumann.resize(ny);
  st.d2_dirichlet.resize(ny);
  st.d2_neumann.resize(ny);
  for (int j = 1; j + 1 < ny; ++j) {
    st.d1_dirichlet[j] = make(j - 1, 3, j, 1);
    st.d1_neumann[j] = st.d1_dirichlet[j];
    st.d2_dirichlet[j] = make(j - 1, 3, j, 2);
    st.d2_neumann[j] = st.d2_dirichlet[j];
  }
  st.d1_dirichlet[0] = make(0, 3, 0, 1);
  st.d1_dirichlet[ny - 1] = make(ny - 3, 3, ny - 1, 1);
  st.d2_dirichlet[0] = make(0, 4, 0, 2);
  st.d2_dirichlet[ny - 1] = make(ny - 4, 4, ny - 1, 2);
  st.d1_neumann[0] = kernels::RowStencil{0, 0, {}};
  st.d1_neumann[ny - 1] = kernels::RowStencil{ny - 1, 0, {}};
  const double h0 = hy_.front();
  const double hn = hy_.back();
  st.d2_neumann[0] =
      kernels::RowStencil{0, 2, {-2.0 / (h0 * h0), 2.0 / (h0 * h0), 0.0, 0.0}, true};
  st.d2_neumann[ny - 1] =
      kernels::RowStencil{ny - 2, 2, {2.0 / (hn * hn), -2.0 / (hn * hn), 0.0, 0.0}, true};
}

void Grid::forward(std::span<const double> physical, std::span<Complex> spectral) const {
  if (physical.size() != size() || spectral.size() != spectral_size()) {
    throw Error(ErrorKind::Mismatch, "grid.forward: array size mismatch");
  }
  fftw_execute_dft_r2c(plans_->forward, const_cast<double*>(physical.data()),
                       reinterpret_cast<fftw_complex*>(spectral.data()));
}

void Grid::inverse(std::span<const Complex> spectral, std::span<double> physical) const {
  if (physical.size() != size() || spectral.size() != spectral_size()) {
    throw Error(ErrorKind::Mismatch, "grid.inverse: array size mismatch");
  }
  // c2r overwrites its input.
  thread_local std::vector<Complex> scratch;
  scratch.assign(spectral.begin(), spectral.end());
  fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(scratch.data()),
                       physical.data());
  const double norm = is_torus() ? 1.0 / static_cast<double>(size()) : 1.0 / spec_.nx;
  for (double& v : physical) v *= norm;
}

GridPtr build_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

}  // namespace nsac
