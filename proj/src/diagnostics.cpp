#include "nsac/diagnostics.hpp"

#include <cmath>
#include <string>

#include "nsac/error.hpp"

namespace nsac {

namespace {

double grad_sq(const ScalarField& f, WallBc bc) {
  const VectorField g = gradient(f, bc);
  return inner(g.x, g.x) + inner(g.y, g.y);
}

}  // namespace

EnergyRecord total_energy(const State& state, const ModelParams& params) {
  const Coefficients c = coefficients(params);
  const WallBc pbc = phase_bc(params);
  EnergyRecord r;
  r.t = state.t;
  r.kinetic = 0.5 * inner(state.u, state.u);
  double g2 = 0.0;
  for (const auto& p : state.phase) g2 += grad_sq(p, pbc);
  r.gradient = 0.5 * c.lambda * g2;
  if (c.has_potential && !state.phase.empty()) {
    r.potential = c.lambda * integral(potential_F(state.phase, params));
  }
  return r;
}

EnergyRecord dissipation(const State& state, const ModelParams& params) {
  const Coefficients c = coefficients(params);
  const WallBc pbc = phase_bc(params);
  EnergyRecord r;
  r.t = state.t;
  if (c.nu != 0.0) {
    r.viscous_dissipation = c.nu * (grad_sq(state.u.x, WallBc::Dirichlet) +
                                    grad_sq(state.u.y, WallBc::Dirichlet));
  }
  if (c.gamma != 0.0 && !state.phase.empty()) {
    const auto f = f_eval(state.phase, params);
    double acc = 0.0;
    for (std::size_t k = 0; k < state.phase.size(); ++k) {
      ScalarField mu = laplacian(state.phase[k], pbc);
      mu -= f[k];
      acc += inner(mu, mu);
    }
    r.phase_dissipation = c.lambda * c.gamma * acc;
  }
  return r;
}

EnergyRecord energy_record(const State& state, const ModelParams& params) {
  EnergyRecord r = total_energy(state, params);
  const EnergyRecord d = dissipation(state, params);
  r.viscous_dissipation = d.viscous_dissipation;
  r.phase_dissipation = d.phase_dissipation;
  return r;
}

DiffRecord pair_difference(const State& a, const State& b, WallBc phase_bc) {
  require_same_grid(*a.grid(), *b.grid(), "pair_difference");
  if (std::abs(a.t - b.t) > 1e-9 * (1.0 + std::abs(a.t))) {
    throw Error(ErrorKind::Mismatch, "pair_difference: states at different times " +
                                         std::to_string(a.t) + " and " + std::to_string(b.t));
  }
  if (a.phase.size() != b.phase.size()) {
    throw Error(ErrorKind::Mismatch, "pair_difference: phase component counts differ");
  }
  DiffRecord r;
  r.t = a.t;
  r.vel_l2 = norm(a.u - b.u, Norm::l2());
  double h1 = 0.0;
  for (std::size_t k = 0; k < a.phase.size(); ++k) {
    const double v = norm(a.phase[k] - b.phase[k], Norm::h1(), nullptr, phase_bc);
    h1 += v * v;
  }
  r.phase_h1 = std::sqrt(h1);
  return r;
}

std::vector<double> energy_residual_series(std::span<const EnergyRecord> records) {
  if (records.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "energy_residual_series: need at least 2 records");
  }
  std::vector<double> r(records.size() - 1);
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    const auto& a = records[n];
    const auto& b = records[n + 1];
    r[n] = (b.total() - a.total()) + (b.t - a.t) * 0.5 * (a.dissipation() + b.dissipation());
  }
  return r;
}

double accumulated_residual(std::span<const EnergyRecord> records) {
  double s = 0.0;
  for (double v : energy_residual_series(records)) s += v;
  return s;
}

PowerFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "fit_power_law: need at least two (x, y) pairs");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "fit_power_law: values must be positive");
    }
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    const double dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "fit_power_law: x values are all equal");
  PowerFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace nsac
