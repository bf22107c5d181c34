#include "nsac/field.hpp"

#include <algorithm>
#include <cmath>

#include "nsac/error.hpp"
#include "nsac/kernels.hpp"
#include "nsac/operators.hpp"

namespace nsac {

namespace k = kernels::omp;

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw Error(ErrorKind::Mismatch, "ScalarField: value count does not match grid");
  }
}

ScalarField ScalarField::from_function(GridPtr grid,
                                       const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  const auto xs = grid->x();
  const auto ys = grid->y();
  for (int j = 0; j < grid->ny(); ++j) {
    for (int i = 0; i < grid->nx(); ++i) out(i, j) = f(xs[i], ys[j]);
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) { return add_scaled(1.0, other); }

ScalarField& ScalarField::operator-=(const ScalarField& other) { return add_scaled(-1.0, other); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::add_scaled(double alpha, const ScalarField& other) {
  require_same_grid(*grid_, *other.grid_, "ScalarField arithmetic");
  k::axpby(alpha, other.values_, 1.0, values_);
  return *this;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.g(), b.g(), "pointwise");
  ScalarField out(a.grid());
  k::multiply(a.values(), b.values(), out.values());
  return out;
}

VectorField::VectorField(ScalarField x_, ScalarField y_) : x(std::move(x_)), y(std::move(y_)) {
  require_same_grid(x.g(), y.g(), "VectorField components");
}

VectorField& VectorField::operator+=(const VectorField& o) {
  x += o.x;
  y += o.y;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  x -= o.x;
  y -= o.y;
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  x *= s;
  y *= s;
  return *this;
}

VectorField& VectorField::add_scaled(double alpha, const VectorField& o) {
  x.add_scaled(alpha, o.x);
  y.add_scaled(alpha, o.y);
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (&a != &b && !(a.spec() == b.spec())) {
    throw Error(ErrorKind::Mismatch, std::string(what) + ": fields live on different grids");
  }
}

StripMask strip_mask(const Grid& grid, double delta) {
  if (!grid.is_channel()) {
    throw Error(ErrorKind::UnsupportedGeometry, "strip_mask: the torus has no walls");
  }
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "strip_mask: delta must be >= 0");
  StripMask m;
  m.delta = delta;
  m.weights.assign(grid.size(), 0.0);
  const auto rho = grid.wall_distance();
  const auto w = grid.quadrature_weights();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (rho[n] < delta) m.weights[n] = w[n];
  }
  return m;
}

namespace {

std::span<const double> weights_for(const Grid& g, const StripMask* mask) {
  if (!mask) return g.quadrature_weights();
  if (mask->weights.size() != g.size()) {
    throw Error(ErrorKind::Mismatch, "norm: strip mask built for a different grid");
  }
  return mask->weights;
}

double linf(std::span<const double> v, const StripMask* mask) {
  if (!mask) return k::max_abs(v);
  double m = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (mask->weights[n] > 0.0) m = std::max(m, std::abs(v[n]));
  }
  return m;
}

double l4(std::span<const double> v, std::span<const double> w) {
  std::vector<double> sq(v.size());
  k::multiply(v, v, sq);
  return std::pow(std::max(0.0, k::weighted_dot(sq, sq, w)), 0.25);
}

// Spectral H^s seminorm-weighted sum for the torus: (A/N^2) sum (1+|k|^2)^s |f_k|^2.
double torus_hs_squared(const ScalarField& f, int s) {
  const Grid& g = f.g();
  const auto coeffs = to_spectral(f);
  const auto k2 = g.k_squared();
  const int nkx = g.nkx();
  const int nx = g.nx();
  double acc = 0.0;
  for (int r = 0; r < g.ny(); ++r) {
    for (int c = 0; c < nkx; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * nkx + c;
      const double mult = (c == 0 || 2 * c == nx) ? 1.0 : 2.0;
      acc += mult * std::pow(1.0 + k2[idx], s) * std::norm(coeffs[idx]);
    }
  }
  const double n = static_cast<double>(g.size());
  return acc * g.spec().lx * g.spec().ly / (n * n);
}

}  // namespace

double inner(const ScalarField& a, const ScalarField& b, const StripMask* mask) {
  require_same_grid(a.g(), b.g(), "inner");
  return k::weighted_dot(a.values(), b.values(), weights_for(a.g(), mask));
}

double inner(const VectorField& a, const VectorField& b, const StripMask* mask) {
  return inner(a.x, b.x, mask) + inner(a.y, b.y, mask);
}

double integral(const ScalarField& f, const StripMask* mask) {
  return k::weighted_sum(f.values(), weights_for(f.g(), mask));
}

double norm(const ScalarField& f, Norm kind, const StripMask* mask, WallBc bc) {
  const Grid& g = f.g();
  const auto w = weights_for(g, mask);
  switch (kind.kind) {
    case NormKind::L2:
      return std::sqrt(std::max(0.0, k::weighted_dot(f.values(), f.values(), w)));
    case NormKind::Linf:
      return linf(f.values(), mask);
    case NormKind::L4:
      return l4(f.values(), w);
    case NormKind::H1: {
      const VectorField grad = gradient(f, bc);
      const double sq = k::weighted_dot(f.values(), f.values(), w) +
                        k::weighted_dot(grad.x.values(), grad.x.values(), w) +
                        k::weighted_dot(grad.y.values(), grad.y.values(), w);
      return std::sqrt(std::max(0.0, sq));
    }
    case NormKind::Hs: {
      if (kind.s < 0 || kind.s > 4) {
        throw Error(ErrorKind::InvalidArgument, "norm: H^s supports integer 0 <= s <= 4");
      }
      if (g.is_torus()) {
        if (mask) throw Error(ErrorKind::UnsupportedGeometry, "norm: masked H^s on the torus");
        return std::sqrt(torus_hs_squared(f, kind.s));
      }
      if (kind.s == 0) return norm(f, Norm::l2(), mask, bc);
      if (kind.s == 1) return norm(f, Norm::h1(), mask, bc);
      throw Error(ErrorKind::UnsupportedGeometry, "norm: channel supports H^s only for s <= 1");
    }
  }
  return 0.0;
}

double norm(const VectorField& f, Norm kind, const StripMask* mask, WallBc bc) {
  switch (kind.kind) {
    case NormKind::L2:
    case NormKind::H1:
    case NormKind::Hs: {
      const double a = norm(f.x, kind, mask, bc);
      const double b = norm(f.y, kind, mask, bc);
      return std::sqrt(a * a + b * b);
    }
    case NormKind::L4:
    case NormKind::Linf: {
      ScalarField mag(f.grid());
      auto m = mag.values();
      const auto ux = f.x.values();
      const auto uy = f.y.values();
      for (std::size_t n = 0; n < m.size(); ++n) m[n] = std::hypot(ux[n], uy[n]);
      return norm(mag, kind, mask, bc);
    }
  }
  return 0.0;
}

VectorField leray_project(const VectorField& u) {
  const Grid& g = u.x.g();
  if (!g.is_torus()) {
    throw Error(ErrorKind::UnsupportedGeometry,
                "leray_project: channel solvers enforce incompressibility via the streamfunction");
  }
  auto ux = to_spectral(u.x);
  auto uy = to_spectral(u.y);
  const auto kx = g.ddx_factor();
  const auto ky = g.ddy_factor();
  for (std::size_t n = 0; n < ux.size(); ++n) {
    const double kk = kx[n] * kx[n] + ky[n] * ky[n];
    if (kk == 0.0) continue;
    const Complex kdotu = (kx[n] * ux[n] + ky[n] * uy[n]) / kk;
    ux[n] -= kx[n] * kdotu;
    uy[n] -= ky[n] * kdotu;
  }
  return VectorField(from_spectral(u.grid(), ux), from_spectral(u.grid(), uy));
}

}  // namespace nsac
