#include "nsac/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsac/error.hpp"
#include "nsac/kernels.hpp"

namespace nsac {

namespace k = kernels::omp;

std::string to_string(Scheme s) { return s == Scheme::IMEX1 ? "IMEX1" : "IMEX2"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "IMEX1") return Scheme::IMEX1;
  if (name == "IMEX2") return Scheme::IMEX2;
  throw Error(ErrorKind::InvalidArgument, "scheme.kind: unknown scheme '" + name + "'");
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidArgument, "scheme.dt: must be finite and > 0");
  }
  if (stabilizer_s0 && !(*stabilizer_s0 >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "scheme.stabilizer_s0: must be >= 0");
  }
  if (!(cfl_target >= 0.0) || cfl_target >= kCflCeiling) {
    throw Error(ErrorKind::InvalidArgument, "scheme.cfl_target: must lie in [0, 1)");
  }
}

double SchemeConfig::s0(const ModelParams& params) const {
  const Coefficients c = coefficients(params);
  if (!c.has_potential) return 0.0;
  if (stabilizer_s0) return *stabilizer_s0;
  return 2.0 / (c.epsilon * c.epsilon);
}

double courant_number(const State& state, double dt) {
  const Grid& g = *state.grid();
  const int nx = g.nx();
  const int ny = g.ny();
  const double dx = g.dx();
  const auto hy = g.y_spacing();
  const auto ux = state.u.x.values();
  const auto uy = state.u.y.values();
  double m = 0.0;
  for (int j = 0; j < ny; ++j) {
    double dy;
    if (g.is_torus()) {
      dy = g.spec().ly / ny;
    } else if (j == 0) {
      dy = hy[0];
    } else if (j == ny - 1) {
      dy = hy[ny - 2];
    } else {
      dy = std::min(hy[j - 1], hy[j]);
    }
    for (int i = 0; i < nx; ++i) {
      const std::size_t n = static_cast<std::size_t>(j) * nx + i;
      m = std::max(m, std::abs(ux[n]) / dx + std::abs(uy[n]) / dy);
    }
  }
  return dt * m;
}

namespace {

struct Tridiag {
  std::vector<double> lower, diag, upper, scale;
};

// alpha*I + beta*(kx^2 - D2) along y; Dirichlet walls become identity rows.
Tridiag helmholtz(const Grid& g, double alpha, double beta, WallBc bc) {
  const int ny = g.ny();
  const auto& rows = bc == WallBc::Neumann ? g.y_stencils().d2_neumann : g.y_stencils().d2_dirichlet;
  Tridiag t;
  t.lower.assign(ny, 0.0);
  t.diag.assign(ny, 0.0);
  t.upper.assign(ny, 0.0);
  t.scale.assign(ny, beta);
  for (int j = 1; j + 1 < ny; ++j) {
    t.lower[j] = -beta * rows[j].weights[0];
    t.diag[j] = alpha - beta * rows[j].weights[1];
    t.upper[j] = -beta * rows[j].weights[2];
  }
  if (bc == WallBc::Dirichlet) {
    t.diag[0] = t.diag[ny - 1] = 1.0;
    t.scale[0] = t.scale[ny - 1] = 0.0;
  } else {
    t.diag[0] = alpha - beta * rows[0].weights[0];
    t.upper[0] = -beta * rows[0].weights[1];
    t.lower[ny - 1] = -beta * rows[ny - 1].weights[0];
    t.diag[ny - 1] = alpha - beta * rows[ny - 1].weights[1];
  }
  return t;
}

void solve(const Tridiag& t, std::span<const double> shift, SpectralArray& rhs, std::size_t ncols) {
  kernels::TridiagonalBatch sys{t.lower, t.diag, t.upper, t.scale, shift};
  k::solve_tridiagonal(sys, rhs, ncols);
}

void zero_wall_rows(const Grid& g, SpectralArray& a) {
  const int nkx = g.nkx();
  const std::size_t last = static_cast<std::size_t>(g.ny() - 1) * nkx;
  for (int c = 0; c < nkx; ++c) {
    a[c] = 0.0;
    a[last + c] = 0.0;
  }
}

void apply_rows_spectral(const Grid& g, const std::vector<kernels::RowStencil>& rows,
                         const SpectralArray& in, SpectralArray& out) {
  std::span<const double> a(reinterpret_cast<const double*>(in.data()), in.size() * 2);
  std::span<double> b(reinterpret_cast<double*>(out.data()), out.size() * 2);
  k::apply_rows(rows, a, b, static_cast<std::size_t>(2 * g.nkx()));
}

void project_spectral(const Grid& g, SpectralArray& ax, SpectralArray& ay) {
  const auto kx = g.ddx_factor();
  const auto ky = g.ddy_factor();
  for (std::size_t n = 0; n < ax.size(); ++n) {
    const double kk = kx[n] * kx[n] + ky[n] * ky[n];
    if (kk == 0.0) continue;
    const Complex d = (kx[n] * ax[n] + ky[n] * ay[n]) / kk;
    ax[n] -= kx[n] * d;
    ay[n] -= ky[n] * d;
  }
}

// Combination used by both schemes: IMEX1 returns a, IMEX2 returns 2a - b/2 (history)
// or 2a - b (extrapolation).
void combine(SpectralArray& out, const SpectralArray& a, const SpectralArray* b, double wa,
             double wb) {
  out.resize(a.size());
  if (!b) {
    for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n];
    return;
  }
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = wa * a[n] + wb * (*b)[n];
}

std::vector<double> column_d1(const Grid& g, const std::vector<double>& col) {
  std::vector<double> out(col.size());
  k::apply_rows(g.y_stencils().d1_dirichlet, col, out, 1);
  return out;
}

void restore_invariants(State& s, const ModelParams& params) {
  const Grid& g = *s.grid();
  if (!g.is_channel()) return;
  const int nx = g.nx();
  const std::size_t last = static_cast<std::size_t>(g.ny() - 1) * nx;
  const bool viscous = coefficients(params).viscous;
  auto ux = s.u.x.values();
  auto uy = s.u.y.values();
  for (int i = 0; i < nx; ++i) {
    uy[i] = 0.0;
    uy[last + i] = 0.0;
    if (viscous) {
      ux[i] = 0.0;
      ux[last + i] = 0.0;
    }
  }
  if (phase_bc(params) == WallBc::Dirichlet) {
    for (std::size_t c = 0; c < s.phase.size() && c < 2; ++c) {
      auto p = s.phase[c].values();
      for (int i = 0; i < nx; ++i) {
        p[i] = params.wall_director[c];
        p[last + i] = params.wall_director[c];
      }
    }
  }
}

}  // namespace

State prepare_state(State state, const ModelParams& params) {
  if (state.u.empty()) throw Error(ErrorKind::InvalidArgument, "prepare_state: empty velocity");
  const Grid& g = *state.grid();
  check_support(params, g);
  const Coefficients c = coefficients(params);
  if (static_cast<int>(state.phase.size()) != c.phase_components) {
    throw Error(ErrorKind::Mismatch, "prepare_state: " + to_string(params.model) + " expects " +
                                         std::to_string(c.phase_components) +
                                         " phase component(s)");
  }
  for (const auto& p : state.phase) require_same_grid(g, p.g(), "prepare_state");
  restore_invariants(state, params);
  if (g.is_channel()) {
    if (state.vorticity.empty()) state.vorticity = channel_vorticity(state.u);
  } else {
    state.vorticity = ScalarField();
  }
  return state;
}

struct Integrator::Impl {
  ModelParams params;
  Coefficients coef;
  SchemeConfig scheme;
  ForcingFn forcing;
  MomentumFilter filter;
  double s0 = 0.0;

  bool has_history = false;
  double prev_dt = 0.0;
  SpectralArray ux_prev, uy_prev, omega_prev;
  std::vector<double> mean_prev;
  std::vector<SpectralArray> phase_prev;
  ExplicitTerms ex_prev;

  // Channel solves, rebuilt when c0 = a0/dt or the grid changes.
  struct ChannelCache {
    double c0 = std::numeric_limits<double>::quiet_NaN();
    GridSpec spec;
    Tridiag vort, poisson, mean, phase;
    std::vector<double> shift;
    SpectralArray w1, w2, p1, p2;
    std::vector<std::array<double, 4>> inv;
  } cache;

  void build_cache(const Grid& g, double c0) {
    if (cache.c0 == c0 && cache.spec == g.spec()) return;
    cache.c0 = c0;
    cache.spec = g.spec();
    const int ny = g.ny();
    const int nkx = g.nkx();
    cache.shift.assign(g.kx_squared_columns().begin(), g.kx_squared_columns().end());
    cache.poisson = helmholtz(g, 0.0, 1.0, WallBc::Dirichlet);
    cache.phase = helmholtz(g, c0 + coef.gamma * s0, coef.gamma, phase_bc(params));
    if (coef.viscous) {
      cache.vort = helmholtz(g, c0, coef.nu, WallBc::Dirichlet);
      cache.mean = helmholtz(g, c0, coef.nu, WallBc::Dirichlet);
      const std::size_t last = static_cast<std::size_t>(ny - 1) * nkx;
      cache.w1.assign(g.spectral_size(), 0.0);
      cache.w2.assign(g.spectral_size(), 0.0);
      for (int c = 0; c < nkx; ++c) {
        cache.w1[c] = 1.0;
        cache.w2[last + c] = 1.0;
      }
      solve(cache.vort, cache.shift, cache.w1, nkx);
      solve(cache.vort, cache.shift, cache.w2, nkx);
      cache.p1 = cache.w1;
      cache.p2 = cache.w2;
      zero_wall_rows(g, cache.p1);
      zero_wall_rows(g, cache.p2);
      solve(cache.poisson, cache.shift, cache.p1, nkx);
      solve(cache.poisson, cache.shift, cache.p2, nkx);
      const auto hy = g.y_spacing();
      const double alpha = 2.0 / (hy.front() * hy.front());
      const double beta = 2.0 / (hy.back() * hy.back());
      const std::size_t r1 = static_cast<std::size_t>(nkx);
      const std::size_t rn = static_cast<std::size_t>(ny - 2) * nkx;
      cache.inv.assign(nkx, {});
      for (int c = 0; c < nkx; ++c) {
        const double a = 1.0 + alpha * cache.p1[r1 + c].real();
        const double b = alpha * cache.p2[r1 + c].real();
        const double cc = beta * cache.p1[rn + c].real();
        const double d = 1.0 + beta * cache.p2[rn + c].real();
        const double det = a * d - b * cc;
        cache.inv[c] = {d / det, -b / det, -cc / det, a / det};
      }
    }
  }

  State torus_step(const State& s, double dt, bool second, const ExplicitTerms& ex);
  State channel_step(const State& s, double dt, bool second, const ExplicitTerms& ex);
  void phase_rhs(const State& s, double dt, bool second, const ExplicitTerms& ex,
                 std::vector<SpectralArray>& phase_now, std::vector<SpectralArray>& rhs) const;
};

void Integrator::Impl::phase_rhs(const State& s, double dt, bool second, const ExplicitTerms& ex,
                                 std::vector<SpectralArray>& phase_now,
                                 std::vector<SpectralArray>& rhs) const {
  const double stab = coef.gamma * s0;
  phase_now.clear();
  rhs.clear();
  for (std::size_t c = 0; c < s.phase.size(); ++c) {
    phase_now.push_back(to_spectral(s.phase[c]));
    const auto& p = phase_now.back();
    SpectralArray hist, expl, star;
    combine(hist, p, second ? &phase_prev[c] : nullptr, 2.0, -0.5);
    combine(expl, ex.phase[c], second ? &ex_prev.phase[c] : nullptr, 2.0, -1.0);
    combine(star, p, second ? &phase_prev[c] : nullptr, 2.0, -1.0);
    SpectralArray r(p.size());
    for (std::size_t n = 0; n < r.size(); ++n) r[n] = hist[n] / dt + expl[n] + stab * star[n];
    rhs.push_back(std::move(r));
  }
}

State Integrator::Impl::torus_step(const State& s, double dt, bool second,
                                   const ExplicitTerms& ex) {
  const GridPtr& gp = s.grid();
  const Grid& g = *gp;
  const double a0 = second ? 1.5 : 1.0;
  const auto k2 = g.k_squared();

  SpectralArray ux = to_spectral(s.u.x);
  SpectralArray uy = to_spectral(s.u.y);
  SpectralArray hx, hy, nx_, ny_;
  combine(hx, ux, second ? &ux_prev : nullptr, 2.0, -0.5);
  combine(hy, uy, second ? &uy_prev : nullptr, 2.0, -0.5);
  combine(nx_, ex.momentum_x, second ? &ex_prev.momentum_x : nullptr, 2.0, -1.0);
  combine(ny_, ex.momentum_y, second ? &ex_prev.momentum_y : nullptr, 2.0, -1.0);
  project_spectral(g, nx_, ny_);
  if (filter) filter(nx_, ny_);
  SpectralArray vx(ux.size()), vy(uy.size());
  for (std::size_t n = 0; n < ux.size(); ++n) {
    const double denom = a0 / dt + coef.nu * k2[n];
    vx[n] = (hx[n] / dt + nx_[n]) / denom;
    vy[n] = (hy[n] / dt + ny_[n]) / denom;
  }
  project_spectral(g, vx, vy);

  std::vector<SpectralArray> phase_now, rhs;
  phase_rhs(s, dt, second, ex, phase_now, rhs);
  State out;
  out.t = s.t + dt;
  out.u = VectorField(from_spectral(gp, vx), from_spectral(gp, vy));
  const double stab = coef.gamma * s0;
  for (auto& r : rhs) {
    for (std::size_t n = 0; n < r.size(); ++n) r[n] /= a0 / dt + stab + coef.gamma * k2[n];
    out.phase.push_back(from_spectral(gp, r));
  }

  ux_prev = std::move(ux);
  uy_prev = std::move(uy);
  phase_prev = std::move(phase_now);
  return out;
}

State Integrator::Impl::channel_step(const State& s, double dt, bool second,
                                     const ExplicitTerms& ex) {
  const GridPtr& gp = s.grid();
  const Grid& g = *gp;
  const int ny = g.ny();
  const int nx = g.nx();
  const int nkx = g.nkx();
  const double a0 = second ? 1.5 : 1.0;
  const double c0 = a0 / dt;
  build_cache(g, c0);

  // Vorticity and streamfunction for the non-mean modes.
  const ScalarField omega_phys = s.vorticity.empty() ? channel_vorticity(s.u) : s.vorticity;
  SpectralArray omega = to_spectral(omega_phys);
  SpectralArray hist, expl;
  combine(hist, omega, second ? &omega_prev : nullptr, 2.0, -0.5);
  combine(expl, ex.vorticity, second ? &ex_prev.vorticity : nullptr, 2.0, -1.0);
  SpectralArray w(omega.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = hist[n] / dt + expl[n];

  SpectralArray psi;
  if (coef.viscous) {
    zero_wall_rows(g, w);
    solve(cache.vort, cache.shift, w, nkx);
    psi = w;
    zero_wall_rows(g, psi);
    solve(cache.poisson, cache.shift, psi, nkx);
    const auto hy = g.y_spacing();
    const double alpha = 2.0 / (hy.front() * hy.front());
    const double beta = 2.0 / (hy.back() * hy.back());
    const std::size_t r1 = static_cast<std::size_t>(nkx);
    const std::size_t rn = static_cast<std::size_t>(ny - 2) * nkx;
    for (int c = 1; c < nkx; ++c) {
      const Complex q1 = -alpha * psi[r1 + c];
      const Complex q2 = -beta * psi[rn + c];
      const auto& m = cache.inv[c];
      const Complex a = m[0] * q1 + m[1] * q2;
      const Complex b = m[2] * q1 + m[3] * q2;
      for (int j = 0; j < ny; ++j) {
        const std::size_t n = static_cast<std::size_t>(j) * nkx + c;
        w[n] += a * cache.w1[n] + b * cache.w2[n];
        psi[n] += a * cache.p1[n] + b * cache.p2[n];
      }
    }
  } else {
    for (auto& v : w) v /= c0;
    psi = w;
    zero_wall_rows(g, psi);
    solve(cache.poisson, cache.shift, psi, nkx);
  }
  for (int j = 0; j < ny; ++j) psi[static_cast<std::size_t>(j) * nkx] = 0.0;

  // Mean flow.
  const std::vector<double> mean_now = row_mean(s.u.x);
  std::vector<double> mean(ny);
  for (int j = 0; j < ny; ++j) {
    const double h = second ? 2.0 * mean_now[j] - 0.5 * mean_prev[j] : mean_now[j];
    const double e =
        second ? 2.0 * ex.mean_velocity[j] - ex_prev.mean_velocity[j] : ex.mean_velocity[j];
    mean[j] = h / dt + e;
  }
  if (coef.viscous) {
    SpectralArray col(mean.begin(), mean.end());
    col.front() = 0.0;
    col.back() = 0.0;
    const std::vector<double> no_shift{0.0};
    solve(cache.mean, no_shift, col, 1);
    for (int j = 0; j < ny; ++j) mean[j] = col[j].real();
  } else {
    for (double& v : mean) v /= c0;
  }
  const std::vector<double> dmean = column_d1(g, mean);
  for (int j = 0; j < ny; ++j) {
    w[static_cast<std::size_t>(j) * nkx] = -static_cast<double>(nx) * dmean[j];
  }

  // Velocity from the streamfunction plus the mean flow.
  SpectralArray ux_hat(psi.size());
  apply_rows_spectral(g, g.y_stencils().d1_dirichlet, psi, ux_hat);
  SpectralArray uy_hat = psi;
  k::scale_imaginary(uy_hat, g.ddx_factor());
  for (auto& v : uy_hat) v = -v;

  State out;
  out.t = s.t + dt;
  out.u = VectorField(from_spectral(gp, ux_hat), from_spectral(gp, uy_hat));
  {
    auto ux = out.u.x.values();
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) ux[static_cast<std::size_t>(j) * nx + i] += mean[j];
    }
  }
  out.vorticity = from_spectral(gp, w);

  // Phase.
  std::vector<SpectralArray> phase_now, rhs;
  phase_rhs(s, dt, second, ex, phase_now, rhs);
  const bool pinned = phase_bc(params) == WallBc::Dirichlet;
  const std::size_t last = static_cast<std::size_t>(ny - 1) * nkx;
  for (std::size_t c = 0; c < rhs.size(); ++c) {
    auto& r = rhs[c];
    if (pinned) {
      zero_wall_rows(g, r);
      const double d = c < 2 ? params.wall_director[c] : 0.0;
      r[0] = static_cast<double>(nx) * d;
      r[last] = static_cast<double>(nx) * d;
    }
    solve(cache.phase, cache.shift, r, nkx);
    out.phase.push_back(from_spectral(gp, r));
  }

  omega_prev = std::move(omega);
  mean_prev = mean_now;
  phase_prev = std::move(phase_now);
  return out;
}

Integrator::Integrator(ModelParams params, SchemeConfig scheme, ForcingFn forcing,
                       MomentumFilter filter)
    : params_(params.normalized()), scheme_(scheme), impl_(std::make_unique<Impl>()) {
  params_.validate();
  scheme_.validate();
  impl_->params = params_;
  impl_->coef = coefficients(params_);
  impl_->scheme = scheme_;
  impl_->forcing = std::move(forcing);
  impl_->filter = std::move(filter);
  impl_->s0 = scheme_.s0(params_);
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

void Integrator::reset() { impl_->has_history = false; }

double Integrator::next_dt(const State& state) const {
  if (scheme_.cfl_target <= 0.0 || scheme_.scheme == Scheme::IMEX2) return scheme_.dt;
  const double rate = courant_number(state, 1.0);
  if (rate <= 0.0) return scheme_.dt;
  return std::min(scheme_.dt, scheme_.cfl_target / rate);
}

State Integrator::step(const State& state, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "step: dt must be > 0");
  const Grid& g = *state.grid();
  check_support(params_, g);
  const double cfl = courant_number(state, dt);
  if (cfl > kCflCeiling) {
    std::ostringstream msg;
    msg << "step: Courant number " << cfl << " exceeds the ceiling " << kCflCeiling
        << " at t=" << state.t;
    throw Error(ErrorKind::Stability, msg.str());
  }
  Forcing f;
  const Forcing* fp = nullptr;
  if (impl_->forcing) {
    f = impl_->forcing(state.t);
    fp = &f;
  }
  ExplicitTerms ex = explicit_terms(state, params_, fp);
  // t_target - t carries rounding, so equal steps only agree to a few ulps
  const bool second = scheme_.scheme == Scheme::IMEX2 && impl_->has_history &&
                      std::abs(impl_->prev_dt - dt) <= 1e-10 * dt;
  State out = g.is_torus() ? impl_->torus_step(state, dt, second, ex)
                           : impl_->channel_step(state, dt, second, ex);
  restore_invariants(out, params_);
  impl_->ex_prev = std::move(ex);
  impl_->has_history = true;
  impl_->prev_dt = dt;
  return out;
}

State step(const State& state, const ModelParams& params, const SchemeConfig& scheme) {
  SchemeConfig s = scheme;
  s.scheme = Scheme::IMEX1;
  Integrator integ(params, s);
  return integ.step(state, scheme.dt);
}

std::size_t step_count(double t0, double T, double dt) {
  if (T < t0) throw Error(ErrorKind::InvalidArgument, "run_to: T is before the state time");
  if (T == t0) return 0;
  return static_cast<std::size_t>(std::ceil((T - t0) / dt - 1e-9));
}

std::pair<State, RunRecord> run_to(const State& initial, double T, const ModelParams& raw,
                                   const SchemeConfig& scheme, const RunOptions& options) {
  if (options.sample_stride < 1) {
    throw Error(ErrorKind::InvalidArgument, "run_to: sample_stride must be >= 1");
  }
  const ModelParams params = raw.normalized();
  State s = prepare_state(initial, params);
  const double t0 = s.t;
  Integrator integ(params, scheme, options.forcing, options.momentum_filter);
  RunRecord rec;
  rec.strip_delta = options.strip_delta;
  const Grid& g = *s.grid();
  std::optional<StripMask> mask;
  if (options.strip_delta && g.is_channel()) mask = strip_mask(g, *options.strip_delta);
  const double nu = coefficients(params).nu;

  auto sample = [&](const State& st, std::size_t n) {
    rec.times.push_back(st.t);
    rec.energy.push_back(energy_record(st, params));
    if (mask) {
      const VectorField gx = gradient(st.u.x, WallBc::Dirichlet);
      const VectorField gy = gradient(st.u.y, WallBc::Dirichlet);
      rec.kato_series.push_back(nu * (inner(gx, gx, &*mask) + inner(gy, gy, &*mask)));
    }
    if (options.keep_snapshots) rec.snapshots.push_back(st);
    if (options.on_sample) options.on_sample(st, n);
  };
  auto advance = [&](double h, double t_target, std::size_t n) {
    s = integ.step(s, h);
    s.t = t_target;
    if (!s.all_finite()) {
      throw Error(ErrorKind::NonFinite, "run_to: non-finite values after step " +
                                            std::to_string(n) + " (t=" + std::to_string(s.t) +
                                            ")");
    }
  };

  sample(s, 0);
  const std::size_t stride = static_cast<std::size_t>(options.sample_stride);
  const bool adaptive = scheme.cfl_target > 0.0 && scheme.scheme == Scheme::IMEX1;
  if (!adaptive) {
    const std::size_t steps = step_count(t0, T, scheme.dt);
    for (std::size_t n = 0; n < steps; ++n) {
      const double t_target = n + 1 == steps ? T : t0 + static_cast<double>(n + 1) * scheme.dt;
      // full steps use dt itself so the step does not depend on where the run started
      const double rest = T - s.t;
      const bool partial = n + 1 == steps && std::abs(rest - scheme.dt) > 1e-9 * scheme.dt;
      advance(partial ? rest : scheme.dt, t_target, n + 1);
      if ((n + 1) % stride == 0 || n + 1 == steps) sample(s, n + 1);
    }
    rec.steps = steps;
  } else {
    if (T < t0) throw Error(ErrorKind::InvalidArgument, "run_to: T is before the state time");
    std::size_t n = 0;
    const double tiny = 1e-12 * std::max(1.0, std::abs(T));
    while (T - s.t > tiny) {
      double h = integ.next_dt(s);
      double t_target = s.t + h;
      if (T - t_target < 1e-9 * h) t_target = T;
      ++n;
      advance(t_target - s.t, t_target, n);
      if (n % stride == 0 || s.t == T) sample(s, n);
    }
    if (n == 0) {
      rec.steps = 0;
    } else {
      rec.steps = n;
      if (rec.times.back() != T) sample(s, n);
    }
  }
  return {std::move(s), std::move(rec)};
}

namespace {

constexpr double kFdStep = 2e-3;

template <typename F>
double d1(F&& f, double h) {
  return (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12.0 * h);
}

template <typename F>
double d2(F&& f, double h) {
  return (-f(2 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2 * h)) / (12.0 * h * h);
}

}  // namespace

State manufactured_state(const Manufactured& m, const ModelParams& params, const GridPtr& grid,
                         double t) {
  State s;
  s.t = t;
  s.u = VectorField(ScalarField::from_function(grid, [&](double x, double y) { return m.u(x, y, t)[0]; }),
                    ScalarField::from_function(grid, [&](double x, double y) { return m.u(x, y, t)[1]; }));
  s.phase.push_back(ScalarField::from_function(grid, [&](double x, double y) { return m.phi(x, y, t); }));
  return prepare_state(std::move(s), params);
}

Forcing manufactured_forcing(const Manufactured& m, const ModelParams& params, const GridPtr& grid,
                             double t) {
  const Coefficients c = coefficients(params);
  if (c.phase_components != 1) {
    throw Error(ErrorKind::InvalidArgument, "manufactured_forcing: scalar phase models only");
  }
  const double h = kFdStep;
  const double inv_eps2 = 1.0 / (c.epsilon * c.epsilon);
  Forcing f;
  f.momentum = VectorField(grid);
  f.phase.emplace_back(grid);
  const auto xs = grid->x();
  const auto ys = grid->y();
  const int nx = grid->nx();
  for (int j = 0; j < grid->ny(); ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = xs[i], y = ys[j];
      const std::size_t n = static_cast<std::size_t>(j) * nx + i;
      const auto u = m.u(x, y, t);
      auto uc = [&](int comp) {
        return std::array<double, 5>{
            d1([&](double e) { return m.u(x, y, t + e)[comp]; }, h),
            d1([&](double e) { return m.u(x + e, y, t)[comp]; }, h),
            d1([&](double e) { return m.u(x, y + e, t)[comp]; }, h),
            d2([&](double e) { return m.u(x + e, y, t)[comp]; }, h),
            d2([&](double e) { return m.u(x, y + e, t)[comp]; }, h)};
      };
      const auto ax = uc(0);
      const auto ay = uc(1);
      const double p = m.phi(x, y, t);
      const double pt = d1([&](double e) { return m.phi(x, y, t + e); }, h);
      const double px = d1([&](double e) { return m.phi(x + e, y, t); }, h);
      const double py = d1([&](double e) { return m.phi(x, y + e, t); }, h);
      const double lap = d2([&](double e) { return m.phi(x + e, y, t); }, h) +
                         d2([&](double e) { return m.phi(x, y + e, t); }, h);
      const double fp = c.has_potential ? (p * p * p - p) * inv_eps2 : 0.0;
      f.momentum.x.values()[n] = ax[0] + u[0] * ax[1] + u[1] * ax[2] + c.lambda * lap * px -
                                 c.nu * (ax[3] + ax[4]);
      f.momentum.y.values()[n] = ay[0] + u[0] * ay[1] + u[1] * ay[2] + c.lambda * lap * py -
                                 c.nu * (ay[3] + ay[4]);
      f.phase[0].values()[n] = pt + u[0] * px + u[1] * py - c.gamma * (lap - fp);
    }
  }
  return f;
}

void check_manufactured_bc(const Manufactured& m, const ModelParams& params, const GridSpec& spec) {
  const Coefficients c = coefficients(params);
  const double tol = 1e-8;
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidArgument, "mms: manufactured fields violate " + what);
  };
  const int samples = 7;
  for (int a = 0; a < samples; ++a) {
    const double t = 0.05 * a;
    const double y = spec.ly * (a + 0.5) / samples;
    const double x = spec.lx * (a + 0.5) / samples;
    // Periodicity in x.
    const auto u0 = m.u(0.0, y, t), u1 = m.u(spec.lx, y, t);
    if (std::abs(u0[0] - u1[0]) > tol || std::abs(u0[1] - u1[1]) > tol ||
        std::abs(m.phi(0.0, y, t) - m.phi(spec.lx, y, t)) > tol) {
      fail("periodicity in x");
    }
    if (spec.geometry == Geometry::Torus) {
      const auto v0 = m.u(x, 0.0, t), v1 = m.u(x, spec.ly, t);
      if (std::abs(v0[0] - v1[0]) > tol || std::abs(v0[1] - v1[1]) > tol ||
          std::abs(m.phi(x, 0.0, t) - m.phi(x, spec.ly, t)) > tol) {
        fail("periodicity in y");
      }
      continue;
    }
    for (double yw : {0.0, spec.ly}) {
      const auto uw = m.u(x, yw, t);
      if (std::abs(uw[1]) > tol) fail("u.n = 0 at the walls");
      if (c.viscous && std::abs(uw[0]) > tol) fail("no-slip at the walls");
      const double dpy = d1([&](double e) { return m.phi(x, yw + e, t); }, kFdStep);
      if (std::abs(dpy) > 1e-6) fail("zero normal derivative of phi at the walls");
    }
  }
}

MmsReport mms_verify(const ModelParams& raw, const GridSpec& base, const Manufactured& m,
                     const MmsOptions& options) {
  const ModelParams params = raw.normalized();
  base.validate();
  check_manufactured_bc(m, params, base);
  if (options.dts.size() < 2) throw Error(ErrorKind::InvalidArgument, "mms: need >= 2 dts");

  auto run = [&](const GridPtr& grid, double dt) {
    SchemeConfig sc;
    sc.dt = dt;
    sc.scheme = options.scheme;
    sc.cfl_target = 0.0;
    RunOptions ro;
    ro.sample_stride = 1 << 30;
    ro.forcing = [&m, &params, grid](double t) { return manufactured_forcing(m, params, grid, t); };
    return run_to(manufactured_state(m, params, grid, 0.0), options.T, params, sc, ro).first;
  };
  auto l2_error = [](const State& a, const State& b) {
    const double v = norm(a.u - b.u, Norm::l2());
    const double p = norm(a.phase[0] - b.phase[0], Norm::l2());
    return std::sqrt(v * v + p * p);
  };

  MmsReport rep;
  const GridPtr grid = build_grid(base);
  const State exact = manufactured_state(m, params, grid, options.T);
  for (double dt : options.dts) {
    rep.dts.push_back(dt);
    rep.temporal_errors.push_back(l2_error(run(grid, dt), exact));
  }
  rep.temporal_order = fit_power_law(rep.dts, rep.temporal_errors).exponent;

  std::vector<State> finals;
  for (int res : options.resolutions) {
    if (res % base.nx != 0 && base.nx % res != 0) {
      throw Error(ErrorKind::InvalidArgument, "mms: resolutions must nest");
    }
    GridSpec s = base;
    s.nx = res;
    s.ny = base.geometry == Geometry::Torus ? base.ny * res / base.nx
                                            : (base.ny - 1) * res / base.nx + 1;
    rep.resolutions.push_back(res);
    finals.push_back(run(build_grid(s), options.spatial_dt));
  }
  const State& fine = finals.back();
  const Grid& fg = *fine.grid();
  for (const State& coarse : finals) {
    const Grid& cg = *coarse.grid();
    const int r = fg.nx() / cg.nx();
    const int ry = fg.is_torus() ? fg.ny() / cg.ny() : (fg.ny() - 1) / (cg.ny() - 1);
    const auto w = cg.quadrature_weights();
    double acc = 0.0;
    auto add = [&](const ScalarField& a, const ScalarField& b) {
      for (int j = 0; j < cg.ny(); ++j) {
        for (int i = 0; i < cg.nx(); ++i) {
          const double d = a(i, j) - b(i * r, j * ry);
          acc += w[static_cast<std::size_t>(j) * cg.nx() + i] * d * d;
        }
      }
    };
    add(coarse.u.x, fine.u.x);
    add(coarse.u.y, fine.u.y);
    add(coarse.phase[0], fine.phase[0]);
    rep.spatial_errors.push_back(std::sqrt(acc));
  }
  rep.spatial_floor = 0.0;
  for (std::size_t i = 0; i + 1 < rep.spatial_errors.size(); ++i) {
    rep.spatial_floor = std::max(rep.spatial_floor, rep.spatial_errors[i]);
  }
  return rep;
}

}  // namespace nsac
