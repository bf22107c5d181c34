#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nsac/grid.hpp"

namespace nsac {

/// Real nodal values on a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  /// Samples f(x, y) at every node.
  static ScalarField from_function(GridPtr grid, const std::function<double(double, double)>& f);

  const GridPtr& grid() const { return grid_; }
  const Grid& g() const { return *grid_; }
  bool empty() const { return !grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_->nx() + i]; }
  double operator()(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * grid_->nx() + i];
  }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  /// this += alpha * other
  ScalarField& add_scaled(double alpha, const ScalarField& other);

  /// True when every value is finite.
  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
/// Pointwise product (no dealiasing).
ScalarField pointwise(const ScalarField& a, const ScalarField& b);

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  explicit VectorField(GridPtr grid) : x(grid), y(grid) {}
  VectorField(ScalarField x_, ScalarField y_);

  const GridPtr& grid() const { return x.grid(); }
  bool empty() const { return x.empty(); }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  VectorField& add_scaled(double alpha, const VectorField& o);
  bool all_finite() const { return x.all_finite() && y.all_finite(); }
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Throws Error(Mismatch) unless both fields live on grids with equal specs.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Quadrature weights restricted to the wall strip {wall_distance < delta}.
struct StripMask {
  double delta = 0.0;
  std::vector<double> weights;
};

/// Nodes with wall distance < delta keep their full trapezoid weight; all
/// others get zero. Channel only.
StripMask strip_mask(const Grid& grid, double delta);

enum class NormKind { L2, H1, Hs, L4, Linf };

struct Norm {
  NormKind kind = NormKind::L2;
  int s = 0;  ///< order for Hs
  static Norm l2() { return {NormKind::L2, 0}; }
  static Norm h1() { return {NormKind::H1, 1}; }
  static Norm hs(int s) { return {NormKind::Hs, s}; }
  static Norm l4() { return {NormKind::L4, 0}; }
  static Norm linf() { return {NormKind::Linf, 0}; }
};

/// Norms of a scalar field. With a mask the integral runs over the wall
/// strip only. On the channel, H1 takes its y-derivatives with the stencils for `bc`.
double norm(const ScalarField& f, Norm kind, const StripMask* mask = nullptr,
            WallBc bc = WallBc::Dirichlet);
/// Norms of a vector field with the pointwise Euclidean magnitude.
double norm(const VectorField& f, Norm kind, const StripMask* mask = nullptr,
            WallBc bc = WallBc::Dirichlet);

/// L2 inner product by trapezoid quadrature.
double inner(const ScalarField& a, const ScalarField& b, const StripMask* mask = nullptr);
double inner(const VectorField& a, const VectorField& b, const StripMask* mask = nullptr);
/// Integral of f over the domain.
double integral(const ScalarField& f, const StripMask* mask = nullptr);

/// Leray projection onto discretely divergence-free fields (torus only).
VectorField leray_project(const VectorField& u);

}  // namespace nsac
