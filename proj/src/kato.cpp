#include "nsac/kato.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsac/error.hpp"

namespace nsac {

double cutoff(double r) {
  if (r <= 0.0) return 1.0;
  if (r >= 1.0) return 0.0;
  return 1.0 - 3.0 * r * r + 2.0 * r * r * r;
}

double cutoff_derivative(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return -6.0 * r + 6.0 * r * r;
}

ScalarField wall_directed_dy(const ScalarField& f) {
  const Grid& g = f.g();
  if (!g.is_channel()) {
    throw Error(ErrorKind::UnsupportedGeometry, "wall_directed_dy: channel only");
  }
  const int nx = g.nx(), ny = g.ny();
  const auto y = g.y();
  const auto h = g.y_spacing();
  const double mid = 0.5 * g.spec().ly;
  ScalarField out(f.grid());
  for (int j = 0; j < ny; ++j) {
    const bool forward = y[j] < mid;
    const int a = forward ? j : j - 1;
    for (int i = 0; i < nx; ++i) out(i, j) = (f(i, a + 1) - f(i, a)) / h[a];
  }
  return out;
}

ScalarField corrector_divergence(const VectorField& theta) {
  return derivative(theta.x, Axis::X, 1) + wall_directed_dy(theta.y);
}

int strip_cells(const Grid& grid, double delta) {
  const auto y = grid.y();
  int n = 0;
  for (int j = 1; j < grid.ny() && y[j] < delta; ++j) ++n;
  return n;
}

Corrector build_corrector(const VectorField& v, double delta) {
  const GridPtr& gp = v.grid();
  const Grid& g = *gp;
  if (!g.is_channel()) {
    throw Error(ErrorKind::UnsupportedGeometry, "build_corrector: the torus has no walls");
  }
  const double ly = g.spec().ly;
  if (!(delta > 0.0) || delta > 0.5 * ly) {
    throw Error(ErrorKind::InvalidArgument,
                "build_corrector: delta must lie in (0, ly/2], got " + std::to_string(delta));
  }
  const int nx = g.nx(), ny = g.ny();
  const auto y = g.y();
  const auto h = g.y_spacing();

  // Streamfunction gauged to zero on the bottom wall, then on the top wall.
  ScalarField xi(gp);
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      xi(i, j) = xi(i, j - 1) + 0.5 * h[j - 1] * (v.x(i, j - 1) + v.x(i, j));
    }
  }
  ScalarField phi(gp);
  for (int j = 0; j < ny; ++j) {
    const double cb = cutoff(y[j] / delta);
    const double ct = cutoff((ly - y[j]) / delta);
    if (cb == 0.0 && ct == 0.0) continue;
    for (int i = 0; i < nx; ++i) {
      const double top = xi(i, j) - xi(i, ny - 1);
      phi(i, j) = cb * xi(i, j) + ct * top;
    }
  }
  Corrector c;
  c.delta = delta;
  c.theta = VectorField(wall_directed_dy(phi), derivative(phi, Axis::X, 1));
  c.theta.y *= -1.0;
  return c;
}

CorrectorNorms corrector_norms(const Corrector& c) {
  const Grid& g = c.theta.x.g();
  CorrectorNorms n;
  n.delta = c.delta;
  n.theta_l2 = norm(c.theta, Norm::l2());
  n.theta_l4 = norm(c.theta, Norm::l4());
  ScalarField grad = gradient_magnitude(c.theta, WallBc::Dirichlet);
  n.grad_l2 = norm(grad, Norm::l2());
  const auto rho = g.wall_distance();
  auto gv = grad.values();
  for (std::size_t k = 0; k < gv.size(); ++k) gv[k] *= rho[k];
  n.rho_grad_linf = norm(grad, Norm::linf());
  n.rho_grad_l2 = norm(grad, Norm::l2());
  return n;
}

CorrectorScalings corrector_scalings(const VectorField& v, const std::vector<double>& deltas) {
  if (deltas.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "corrector_scalings: need at least two deltas");
  }
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  if (*hi < 100.0 * *lo * (1.0 - 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "corrector_scalings: ladder spans less than two decades");
  }
  const Grid& g = v.x.g();
  for (double d : deltas) {
    const int cells = strip_cells(g, d);
    if (cells < 8) {
      throw Error(ErrorKind::InvalidArgument, "corrector_scalings: delta " + std::to_string(d) +
                                                  " covers only " + std::to_string(cells) +
                                                  " cells (need 8)");
    }
  }
  CorrectorScalings s;
  std::vector<double> a, b, c, d, e;
  for (double delta : deltas) {
    const CorrectorNorms n = corrector_norms(build_corrector(v, delta));
    s.rows.push_back(n);
    a.push_back(n.theta_l2);
    b.push_back(n.theta_l4);
    c.push_back(n.grad_l2);
    d.push_back(n.rho_grad_linf);
    e.push_back(n.rho_grad_l2);
  }
  s.theta_l2 = fit_power_law(deltas, a).exponent;
  s.theta_l4 = fit_power_law(deltas, b).exponent;
  s.grad_l2 = fit_power_law(deltas, c).exponent;
  s.rho_grad_linf = fit_power_law(deltas, d).exponent;
  s.rho_grad_l2 = fit_power_law(deltas, e).exponent;
  return s;
}

double kato_integral(const RunRecord& record, double c, double nu) {
  if (record.kato_series.empty() || record.kato_series.size() != record.times.size()) {
    throw Error(ErrorKind::InvalidArgument, "kato_integral: record has no strip samples");
  }
  const double delta = c * nu;
  if (!record.strip_delta ||
      std::abs(*record.strip_delta - delta) > 1e-12 * std::max(1.0, std::abs(delta))) {
    throw Error(ErrorKind::Mismatch, "kato_integral: record strip width does not equal c*nu = " +
                                         std::to_string(delta));
  }
  double k = 0.0;
  for (std::size_t i = 0; i + 1 < record.times.size(); ++i) {
    k += 0.5 * (record.times[i + 1] - record.times[i]) *
         (record.kato_series[i] + record.kato_series[i + 1]);
  }
  return k;
}

double budget_Y(const State& u, const State& v, const VectorField& theta, double lambda,
                WallBc phase_bc) {
  VectorField w = u.u - v.u;
  w += theta;
  double y = inner(w, w);
  for (std::size_t k = 0; k < u.phase.size(); ++k) {
    const double z = norm(u.phase[k] - v.phase[k], Norm::h1(), nullptr, phase_bc);
    y += lambda * z * z;
  }
  return y;
}

namespace {

double grad_sq(const ScalarField& f, WallBc bc, const StripMask* m = nullptr) {
  const VectorField g = gradient(f, bc);
  return inner(g.x, g.x, m) + inner(g.y, g.y, m);
}

}  // namespace

ErrorBudget error_budget(const RunRecord& viscous, const RunRecord& inviscid,
                         const std::vector<Corrector>& theta, const ModelParams& raw, double C) {
  const std::size_t n = viscous.snapshots.size();
  if (n == 0 || inviscid.snapshots.size() != n || theta.size() != n) {
    throw Error(ErrorKind::Mismatch, "error_budget: snapshot and corrector counts differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double a = viscous.snapshots[i].t, b = inviscid.snapshots[i].t;
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
      throw Error(ErrorKind::Mismatch, "error_budget: sample " + std::to_string(i) +
                                           " has times " + std::to_string(a) + " and " +
                                           std::to_string(b));
    }
  }
  const ModelParams params = raw.normalized();
  const Coefficients c = coefficients(params);
  const WallBc pbc = phase_bc(params);
  const double nu = c.nu;
  const double sq = std::sqrt(nu);
  ErrorBudget out;
  out.C = C;
  out.delta = theta.front().delta;
  const Grid& g = *viscous.snapshots.front().grid();
  const StripMask mask = strip_mask(g, out.delta);
  for (std::size_t i = 0; i < n; ++i) {
    const State& u = viscous.snapshots[i];
    const State& v = inviscid.snapshots[i];
    require_same_grid(*u.grid(), *v.grid(), "error_budget");
    out.times.push_back(u.t);
    out.Y.push_back(budget_Y(u, v, theta[i].theta, c.lambda, pbc));

    const double gv2 = grad_sq(v.u.x, WallBc::Dirichlet) + grad_sq(v.u.y, WallBc::Dirichlet);
    const double gv_inf = norm(gradient_magnitude(v.u, WallBc::Dirichlet), Norm::linf());
    double gphi2 = 0.0;
    for (const auto& p : u.phase) gphi2 += grad_sq(p, pbc);
    out.a.push_back(nu * (C + gv2 + gv_inf * gv_inf + C * gphi2));

    const double v_inf = norm(v.u, Norm::linf(), &mask);
    const double gu2 = grad_sq(u.u.x, WallBc::Dirichlet, &mask) +
                       grad_sq(u.u.y, WallBc::Dirichlet, &mask);
    ScalarField gphi(u.grid());
    for (const auto& p : u.phase) {
      const VectorField gr = gradient(p, pbc);
      gphi += pointwise(gr.x, gr.x);
      gphi += pointwise(gr.y, gr.y);
    }
    for (double& x : gphi.values()) x = std::sqrt(x);
    const double gphi_l4 = norm(gphi, Norm::l4(), &mask);
    out.b.push_back(C * sq * (1.0 + v_inf) * std::sqrt(gu2) + C * nu * gu2 +
                    C * sq * gphi_l4 * gphi_l4);
  }
  return out;
}

}  // namespace nsac
