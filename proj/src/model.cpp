#include "nsac/model.hpp"

#include <cmath>
#include <limits>

#include "nsac/error.hpp"
#include "nsac/kernels.hpp"

namespace nsac {

namespace k = kernels::omp;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::NSAC: return "NSAC";
    case ModelKind::EulerAC: return "EulerAC";
    case ModelKind::MHD: return "MHD";
    case ModelKind::MHDInviscid: return "MHDInviscid";
    case ModelKind::LiquidCrystal: return "LiquidCrystal";
    case ModelKind::LiquidCrystalInviscid: return "LiquidCrystalInviscid";
    case ModelKind::TransportPhase: return "TransportPhase";
  }
  return "unknown";
}

ModelKind model_from_string(const std::string& name) {
  for (ModelKind kind : {ModelKind::NSAC, ModelKind::EulerAC, ModelKind::MHD,
                         ModelKind::MHDInviscid, ModelKind::LiquidCrystal,
                         ModelKind::LiquidCrystalInviscid, ModelKind::TransportPhase}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorKind::InvalidArgument, "model.kind: unknown model '" + name + "'");
}

bool is_inviscid(ModelKind kind) {
  return kind == ModelKind::EulerAC || kind == ModelKind::MHDInviscid ||
         kind == ModelKind::LiquidCrystalInviscid;
}

ModelKind inviscid_counterpart(ModelKind kind) {
  switch (kind) {
    case ModelKind::NSAC:
    case ModelKind::EulerAC: return ModelKind::EulerAC;
    case ModelKind::MHD:
    case ModelKind::MHDInviscid: return ModelKind::MHDInviscid;
    case ModelKind::LiquidCrystal:
    case ModelKind::LiquidCrystalInviscid: return ModelKind::LiquidCrystalInviscid;
    case ModelKind::TransportPhase: break;
  }
  throw Error(ErrorKind::InvalidArgument, "TransportPhase has no inviscid counterpart");
}

ModelParams ModelParams::normalized() const {
  ModelParams p = *this;
  switch (p.model) {
    case ModelKind::EulerAC:
    case ModelKind::LiquidCrystalInviscid: p.nu = 0.0; break;
    case ModelKind::MHDInviscid:
      p.nu = 0.0;
      p.re = std::numeric_limits<double>::infinity();
      break;
    case ModelKind::MHD: p.nu = 1.0 / p.re; break;
    case ModelKind::TransportPhase: p.gamma = 0.0; break;
    default: break;
  }
  return p;
}

void ModelParams::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw Error(ErrorKind::InvalidArgument, "model." + key + ": " + why);
  };
  if (!(nu >= 0.0) || !std::isfinite(nu)) fail("nu", "must be finite and >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda", "must be > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma", "must be >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("epsilon", "must be > 0");
  if (model == ModelKind::MHD || model == ModelKind::MHDInviscid) {
    if (!(s_coupling > 0.0)) fail("s_coupling", "must be > 0");
    if (!(re > 0.0)) fail("re", "must be > 0");
    if (!(rm > 0.0) || !std::isfinite(rm)) fail("rm", "must be finite and > 0");
  }
}

Coefficients coefficients(const ModelParams& raw) {
  const ModelParams p = raw.normalized();
  Coefficients c;
  c.viscous = !is_inviscid(p.model);
  c.nu = c.viscous ? p.nu : 0.0;
  c.lambda = p.lambda;
  c.gamma = p.gamma;
  c.epsilon = p.epsilon;
  switch (p.model) {
    case ModelKind::MHD:
    case ModelKind::MHDInviscid:
      c.nu = c.viscous ? 1.0 / p.re : 0.0;
      c.lambda = p.s_coupling;
      c.gamma = 1.0 / p.rm;
      c.has_potential = false;
      break;
    case ModelKind::LiquidCrystal:
    case ModelKind::LiquidCrystalInviscid: c.phase_components = 2; break;
    case ModelKind::TransportPhase:
      c.gamma = 0.0;
      c.has_potential = false;
      c.phase_components = 2;
      break;
    default: break;
  }
  return c;
}

ModelParams with_viscosity(ModelParams params, double nu) {
  if (is_inviscid(params.model)) {
    throw Error(ErrorKind::InvalidArgument,
                "with_viscosity: " + to_string(params.model) + " is an inviscid model");
  }
  params.nu = nu;
  if (params.model == ModelKind::MHD) {
    params.re = nu > 0.0 ? 1.0 / nu : std::numeric_limits<double>::infinity();
  }
  return params;
}

WallBc phase_bc(const ModelParams& params) {
  return (params.model == ModelKind::LiquidCrystal ||
          params.model == ModelKind::LiquidCrystalInviscid)
             ? WallBc::Dirichlet
             : WallBc::Neumann;
}

void check_support(const ModelParams& params, const Grid& grid) {
  const bool lc = params.model == ModelKind::LiquidCrystal ||
                  params.model == ModelKind::LiquidCrystalInviscid;
  const bool mhd = params.model == ModelKind::MHD || params.model == ModelKind::MHDInviscid;
  if (lc && !grid.is_channel()) {
    throw Error(ErrorKind::UnsupportedGeometry, to_string(params.model) + " requires the channel");
  }
  if (mhd && !grid.is_torus()) {
    throw Error(ErrorKind::UnsupportedGeometry, to_string(params.model) + " requires the torus");
  }
}

bool State::all_finite() const {
  if (!u.all_finite()) return false;
  for (const auto& p : phase) {
    if (!p.all_finite()) return false;
  }
  return vorticity.empty() || vorticity.all_finite();
}

std::vector<ScalarField> f_eval(const std::vector<ScalarField>& phase, const ModelParams& params) {
  const Coefficients c = coefficients(params);
  std::vector<ScalarField> out;
  out.reserve(phase.size());
  if (!c.has_potential) {
    for (const auto& p : phase) out.emplace_back(p.grid());
    return out;
  }
  const double inv_eps2 = 1.0 / (c.epsilon * c.epsilon);
  if (phase.size() == 1) {
    ScalarField f(phase[0].grid());
    k::double_well(phase[0].values(), inv_eps2, f.values());
    out.push_back(std::move(f));
    return out;
  }
  ScalarField m2(phase[0].grid());
  for (const auto& p : phase) {
    const auto v = p.values();
    auto m = m2.values();
    for (std::size_t n = 0; n < m.size(); ++n) m[n] += v[n] * v[n];
  }
  for (const auto& p : phase) {
    ScalarField f(p.grid());
    const auto v = p.values();
    const auto m = m2.values();
    auto o = f.values();
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = (m[n] - 1.0) * v[n] * inv_eps2;
    out.push_back(std::move(f));
  }
  return out;
}

ScalarField potential_F(const std::vector<ScalarField>& phase, const ModelParams& params) {
  const Coefficients c = coefficients(params);
  ScalarField out(phase.at(0).grid());
  if (!c.has_potential) return out;
  const double scale = 1.0 / (4.0 * c.epsilon * c.epsilon);
  ScalarField m2(phase[0].grid());
  for (const auto& p : phase) {
    const auto v = p.values();
    auto m = m2.values();
    for (std::size_t n = 0; n < m.size(); ++n) m[n] += v[n] * v[n];
  }
  auto o = out.values();
  const auto m = m2.values();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = scale * (m[n] - 1.0) * (m[n] - 1.0);
  return out;
}

VectorField elastic_stress(const std::vector<ScalarField>& phase, double lambda, StressForm form,
                           WallBc bc) {
  const GridPtr& grid = phase.at(0).grid();
  VectorField out(grid);
  for (const auto& p : phase) {
    const VectorField g = gradient(p, bc);
    if (form == StressForm::Reduced) {
      const ScalarField lap = laplacian(p, bc);
      out.x += product(lap, g.x);
      out.y += product(lap, g.y);
    } else {
      const ScalarField xx = product(g.x, g.x);
      const ScalarField xy = product(g.x, g.y);
      const ScalarField yy = product(g.y, g.y);
      out.x += derivative(xx, Axis::X, 1, WallBc::Dirichlet) +
               derivative(xy, Axis::Y, 1, WallBc::Dirichlet);
      out.y += derivative(xy, Axis::X, 1, WallBc::Dirichlet) +
               derivative(yy, Axis::Y, 1, WallBc::Dirichlet);
    }
  }
  out *= lambda;
  return out;
}

std::vector<double> row_mean(const ScalarField& f) {
  const Grid& g = f.g();
  std::vector<double> m(g.ny(), 0.0);
  const auto v = f.values();
  for (int j = 0; j < g.ny(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < g.nx(); ++i) acc += v[static_cast<std::size_t>(j) * g.nx() + i];
    m[j] = acc / g.nx();
  }
  return m;
}

ScalarField channel_vorticity(const VectorField& u) { return curl(u, WallBc::Dirichlet); }

namespace {

SpectralArray masked_forward(const ScalarField& f) {
  auto c = to_spectral(f);
  dealias_in_place(f.g(), c);
  return c;
}

// Physical field of a spectral derivative factor applied to `hat`.
ScalarField spectral_d(const GridPtr& grid, const SpectralArray& hat, std::span<const double> factor) {
  SpectralArray c = hat;
  k::scale_imaginary(c, factor);
  return from_spectral(grid, c);
}

// u.grad(q) pointwise for precomputed derivatives.
ScalarField advect(const VectorField& u, const ScalarField& qx, const ScalarField& qy) {
  ScalarField out = pointwise(u.x, qx);
  out += pointwise(u.y, qy);
  return out;
}

void add_to(SpectralArray& acc, const SpectralArray& v, double s) {
  for (std::size_t n = 0; n < acc.size(); ++n) acc[n] += s * v[n];
}

std::vector<double> d1_column(const Grid& g, const std::vector<double>& col) {
  std::vector<double> out(col.size());
  k::apply_rows(g.y_stencils().d1_dirichlet, col, out, 1);
  return out;
}

std::vector<double> d2_column(const Grid& g, const std::vector<double>& col) {
  std::vector<double> out(col.size());
  k::apply_rows(g.y_stencils().d2_dirichlet, col, out, 1);
  return out;
}

}  // namespace

ExplicitTerms explicit_terms(const State& state, const ModelParams& params, const Forcing* forcing) {
  const GridPtr& gp = state.grid();
  const Grid& g = *gp;
  const Coefficients c = coefficients(params);
  const WallBc pbc = phase_bc(params);
  ExplicitTerms out;

  // Stress force -lambda sum Lap(phi) grad(phi), dealiased, plus phase advection.
  ScalarField fx(gp), fy(gp);
  std::vector<ScalarField> adv_phase;
  for (const auto& p : state.phase) {
    const VectorField gr = gradient(p, pbc);
    const ScalarField lap = laplacian(p, pbc);
    fx += pointwise(lap, gr.x);
    fy += pointwise(lap, gr.y);
    adv_phase.push_back(advect(state.u, gr.x, gr.y));
  }
  const auto fpot = f_eval(state.phase, params);
  out.phase.reserve(state.phase.size());
  for (std::size_t comp = 0; comp < state.phase.size(); ++comp) {
    auto n = masked_forward(adv_phase[comp]);
    for (auto& v : n) v = -v;
    if (c.has_potential && c.gamma != 0.0) add_to(n, masked_forward(fpot[comp]), -c.gamma);
    if (forcing && !forcing->phase.empty()) add_to(n, masked_forward(forcing->phase[comp]), 1.0);
    out.phase.push_back(std::move(n));
  }

  if (g.is_torus()) {
    const auto ux = to_spectral(state.u.x);
    const auto uy = to_spectral(state.u.y);
    const ScalarField uxx = spectral_d(gp, ux, g.ddx_factor());
    const ScalarField uxy = spectral_d(gp, ux, g.ddy_factor());
    const ScalarField uyx = spectral_d(gp, uy, g.ddx_factor());
    const ScalarField uyy = spectral_d(gp, uy, g.ddy_factor());
    out.momentum_x = masked_forward(advect(state.u, uxx, uxy));
    out.momentum_y = masked_forward(advect(state.u, uyx, uyy));
    for (auto& v : out.momentum_x) v = -v;
    for (auto& v : out.momentum_y) v = -v;
    add_to(out.momentum_x, masked_forward(fx), -c.lambda);
    add_to(out.momentum_y, masked_forward(fy), -c.lambda);
    if (forcing && !forcing->momentum.empty()) {
      add_to(out.momentum_x, masked_forward(forcing->momentum.x), 1.0);
      add_to(out.momentum_y, masked_forward(forcing->momentum.y), 1.0);
    }
    return out;
  }

  // Channel: vorticity form for the non-mean x-modes, mean flow U(y) directly.
  const ScalarField omega = state.vorticity.empty() ? channel_vorticity(state.u) : state.vorticity;
  const ScalarField wx = derivative(omega, Axis::X, 1);
  const ScalarField wy = derivative(omega, Axis::Y, 1, WallBc::Dirichlet);
  out.vorticity = masked_forward(advect(state.u, wx, wy));
  for (auto& v : out.vorticity) v = -v;

  ScalarField force_x = dealias(fx);
  ScalarField force_y = dealias(fy);
  force_x *= -c.lambda;
  force_y *= -c.lambda;
  if (forcing && !forcing->momentum.empty()) {
    force_x += dealias(forcing->momentum.x);
    force_y += dealias(forcing->momentum.y);
  }
  const VectorField force(std::move(force_x), std::move(force_y));
  add_to(out.vorticity, masked_forward(curl(force, WallBc::Dirichlet)), 1.0);

  const auto uxuy = row_mean(pointwise(state.u.x, state.u.y));
  const auto flux_div = d1_column(g, uxuy);
  const auto fmean = row_mean(force.x);
  out.mean_velocity.resize(g.ny());
  for (int j = 0; j < g.ny(); ++j) out.mean_velocity[j] = -flux_div[j] + fmean[j];
  return out;
}

Tendency rhs(const State& state, const ModelParams& params, const Forcing* forcing) {
  check_support(params, state.grid() ? *state.grid() : throw Error(ErrorKind::InvalidArgument,
                                                                   "rhs: empty state"));
  const GridPtr& gp = state.grid();
  const Grid& g = *gp;
  const Coefficients c = coefficients(params);
  const WallBc pbc = phase_bc(params);
  const ExplicitTerms ex = explicit_terms(state, params, forcing);
  Tendency t;
  for (std::size_t comp = 0; comp < state.phase.size(); ++comp) {
    ScalarField d = from_spectral(gp, ex.phase[comp]);
    if (c.gamma != 0.0) d.add_scaled(c.gamma, laplacian(state.phase[comp], pbc));
    t.phase.push_back(std::move(d));
  }
  if (g.is_torus()) {
    VectorField du(from_spectral(gp, ex.momentum_x), from_spectral(gp, ex.momentum_y));
    du = leray_project(du);
    if (c.nu != 0.0) {
      du.x.add_scaled(c.nu, laplacian(state.u.x));
      du.y.add_scaled(c.nu, laplacian(state.u.y));
    }
    t.velocity = std::move(du);
    return t;
  }
  t.vorticity = from_spectral(gp, ex.vorticity);
  t.mean_velocity = ex.mean_velocity;
  if (c.nu != 0.0) {
    const ScalarField omega =
        state.vorticity.empty() ? channel_vorticity(state.u) : state.vorticity;
    t.vorticity.add_scaled(c.nu, laplacian(omega, WallBc::Dirichlet));
    const auto d2u = d2_column(g, row_mean(state.u.x));
    for (int j = 0; j < g.ny(); ++j) t.mean_velocity[j] += c.nu * d2u[j];
  }
  return t;
}

double energy_transfer_residual(const VectorField& u, const ScalarField& phi, double lambda) {
  const VectorField gr = gradient(phi, WallBc::Neumann);
  const ScalarField lap = laplacian(phi, WallBc::Neumann);
  const VectorField stress(product(lap, gr.x), product(lap, gr.y));
  const ScalarField adv = product(u.x, gr.x) + product(u.y, gr.y);
  return -lambda * inner(stress, u) + lambda * inner(adv, lap);
}

VectorField magnetic_from_potential(const ScalarField& phi) {
  VectorField b(derivative(phi, Axis::Y, 1, WallBc::Neumann), derivative(phi, Axis::X, 1));
  b.x *= -1.0;
  return b;
}

PrimitiveMhdTendency primitive_mhd_rhs(const VectorField& u, const VectorField& b,
                                       const ModelParams& params) {
  const Grid& g = u.x.g();
  if (!g.is_torus()) {
    throw Error(ErrorKind::UnsupportedGeometry, "primitive_mhd_rhs: torus only");
  }
  const Coefficients c = coefficients(params);
  auto directional = [](const VectorField& a, const ScalarField& q) {
    const VectorField gq = gradient(q);
    return product(a.x, gq.x) + product(a.y, gq.y);
  };
  PrimitiveMhdTendency out;
  VectorField mom(ScalarField(u.grid()), ScalarField(u.grid()));
  mom.x = c.lambda * directional(b, b.x) - directional(u, u.x);
  mom.y = c.lambda * directional(b, b.y) - directional(u, u.y);
  mom = leray_project(mom);
  if (c.nu != 0.0) {
    mom.x.add_scaled(c.nu, laplacian(u.x));
    mom.y.add_scaled(c.nu, laplacian(u.y));
  }
  out.velocity = std::move(mom);

  VectorField ind(directional(b, u.x) - directional(u, b.x), directional(b, u.y) - directional(u, b.y));
  ind.x.add_scaled(c.gamma, laplacian(b.x));
  ind.y.add_scaled(c.gamma, laplacian(b.y));
  out.magnetic = std::move(ind);
  return out;
}

}  // namespace nsac
