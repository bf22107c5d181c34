#include "nsac/initial.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>

#include "nsac/error.hpp"
#include "nsac/timestep.hpp"

namespace nsac {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

const std::vector<std::string>& initial_condition_names() {
  static const std::vector<std::string> names{"taylor_green", "single_mode_phase",
                                              "random_bandlimited", "channel_shear_layer"};
  return names;
}

void InitialCondition::validate() const {
  const auto& names = initial_condition_names();
  if (std::find(names.begin(), names.end(), recipe) == names.end()) {
    throw Error(ErrorKind::InvalidArgument, "ic.recipe: unknown recipe '" + recipe + "'");
  }
  if (!std::isfinite(amplitude)) throw Error(ErrorKind::InvalidArgument, "ic.amplitude: not finite");
  if (!std::isfinite(phase_amplitude)) {
    throw Error(ErrorKind::InvalidArgument, "ic.phase_amplitude: not finite");
  }
  if (modes < 1) throw Error(ErrorKind::InvalidArgument, "ic.modes: must be >= 1");
}

namespace {

using Fn2 = std::function<double(double, double)>;

struct Mode {
  int kx, ky;
  double amp, shift;
};

// Max |f| over a fixed lattice so the scaling does not depend on the grid.
double lattice_max(const Fn2& f, double lx, double ly) {
  constexpr int n = 128;
  double m = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(f(lx * i / n, ly * j / n)));
  }
  return m;
}

struct Recipe {
  Fn2 ux, uy, phi;
};

Recipe taylor_green(const InitialCondition& ic, const GridSpec& s) {
  const double a = 2.0 * std::numbers::pi / s.lx;
  const double b = 2.0 * std::numbers::pi / s.ly;
  const double A = ic.amplitude, P = ic.phase_amplitude;
  return {[=](double x, double y) { return A * std::sin(a * x) * std::cos(b * y); },
          [=](double x, double y) { return -A * (a / b) * std::cos(a * x) * std::sin(b * y); },
          [=](double x, double y) { return 1.0 + P * std::cos(a * x) * std::cos(b * y); }};
}

Recipe single_mode(const InitialCondition& ic, const GridSpec& s) {
  const double a = 2.0 * std::numbers::pi / s.lx;
  const double P = ic.phase_amplitude;
  return {[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
          [=](double x, double) { return P * std::cos(a * x); }};
}

Recipe random_torus(const InitialCondition& ic, const GridSpec& s) {
  Rng rng(ic.seed);
  const double a = 2.0 * std::numbers::pi / s.lx;
  const double b = 2.0 * std::numbers::pi / s.ly;
  std::vector<Mode> vel, ph;
  for (int kx = 0; kx <= ic.modes; ++kx) {
    for (int ky = -ic.modes; ky <= ic.modes; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const double k2 = a * a * kx * kx + b * b * ky * ky;
      const double av = rng.normal() / (1.0 + k2);
      const double sv = 2.0 * std::numbers::pi * rng.uniform();
      const double ap = rng.normal() / (1.0 + k2);
      const double sp = 2.0 * std::numbers::pi * rng.uniform();
      vel.push_back({kx, ky, av, sv});
      ph.push_back({kx, ky, ap, sp});
    }
  }
  // psi = sum amp cos(theta), u = (dy psi, -dx psi).
  Fn2 ux = [=](double x, double y) {
    double v = 0.0;
    for (const auto& m : vel) v -= m.amp * b * m.ky * std::sin(a * m.kx * x + b * m.ky * y + m.shift);
    return v;
  };
  Fn2 uy = [=](double x, double y) {
    double v = 0.0;
    for (const auto& m : vel) v += m.amp * a * m.kx * std::sin(a * m.kx * x + b * m.ky * y + m.shift);
    return v;
  };
  Fn2 phi = [=](double x, double y) {
    double v = 0.0;
    for (const auto& m : ph) v += m.amp * std::cos(a * m.kx * x + b * m.ky * y + m.shift);
    return v;
  };
  return {ux, uy, phi};
}

Recipe random_channel(const InitialCondition& ic, const GridSpec& s) {
  Rng rng(ic.seed);
  const double a = 2.0 * std::numbers::pi / s.lx;
  const double q = std::numbers::pi / s.ly;
  std::vector<Mode> vel, ph;
  for (int kx = 0; kx <= ic.modes; ++kx) {
    for (int m = 0; m <= ic.modes; ++m) {
      const double k2 = a * a * kx * kx + q * q * m * m;
      const double av = rng.normal() / (1.0 + k2);
      const double sv = 2.0 * std::numbers::pi * rng.uniform();
      const double ap = rng.normal() / (1.0 + k2);
      const double sp = 2.0 * std::numbers::pi * rng.uniform();
      if (m >= 1) vel.push_back({kx, m, av, sv});
      if (kx + m > 0) ph.push_back({kx, m, ap, sp});
    }
  }
  // psi = sum amp cos(a kx x + shift) sin^2(q y) sin(m q y): psi and dy psi vanish on the walls.
  Fn2 ux = [=](double x, double y) {
    double v = 0.0;
    const double s1 = std::sin(q * y), c1 = std::cos(q * y);
    for (const auto& md : vel) {
      const double sm = std::sin(md.ky * q * y), cm = std::cos(md.ky * q * y);
      const double dy = 2.0 * q * s1 * c1 * sm + md.ky * q * s1 * s1 * cm;
      v += md.amp * std::cos(a * md.kx * x + md.shift) * dy;
    }
    return v;
  };
  Fn2 uy = [=](double x, double y) {
    double v = 0.0;
    const double s1 = std::sin(q * y);
    for (const auto& md : vel) {
      const double prof = s1 * s1 * std::sin(md.ky * q * y);
      v += md.amp * a * md.kx * std::sin(a * md.kx * x + md.shift) * prof;
    }
    return v;
  };
  Fn2 phi = [=](double x, double y) {
    double v = 0.0;
    for (const auto& md : ph) {
      v += md.amp * std::cos(a * md.kx * x + md.shift) * std::cos(md.ky * q * y);
    }
    return v;
  };
  return {ux, uy, phi};
}

Recipe shear_layer(const InitialCondition& ic, const GridSpec& s, const ModelParams& params) {
  const double a = 2.0 * std::numbers::pi / s.lx;
  const double q = std::numbers::pi / s.ly;
  const double A = ic.amplitude, P = ic.phase_amplitude;
  const double w = std::sqrt(2.0) * coefficients(params).epsilon;
  const double mid = 0.5 * s.ly;
  return {[=](double, double y) { return A * std::sin(q * y); }, [](double, double) { return 0.0; },
          [=](double x, double y) { return std::tanh((y - mid - P * std::cos(a * x)) / w); }};
}

Fn2 normalized(Fn2 f, double target, const GridSpec& s) {
  const double m = lattice_max(f, s.lx, s.ly);
  const double scale = m > 0.0 ? target / m : 0.0;
  return [f, scale](double x, double y) { return scale * f(x, y); };
}

}  // namespace

State make_initial_state(const InitialCondition& ic, const GridPtr& grid, const ModelParams& raw) {
  ic.validate();
  const ModelParams params = raw.normalized();
  const GridSpec& s = grid->spec();
  const bool channel = s.geometry == Geometry::Channel;
  Recipe r;
  if (ic.recipe == "taylor_green") {
    if (channel) {
      throw Error(ErrorKind::UnsupportedGeometry, "ic.recipe: taylor_green is a torus recipe");
    }
    r = taylor_green(ic, s);
  } else if (ic.recipe == "single_mode_phase") {
    r = single_mode(ic, s);
  } else if (ic.recipe == "random_bandlimited") {
    r = channel ? random_channel(ic, s) : random_torus(ic, s);
    // Scale the pair so that max|u| = amplitude.
    Fn2 ux = r.ux, uy = r.uy;
    const double m = lattice_max([&](double x, double y) { return std::hypot(ux(x, y), uy(x, y)); },
                                 s.lx, s.ly);
    const double scale = m > 0.0 ? ic.amplitude / m : 0.0;
    r.ux = [ux, scale](double x, double y) { return scale * ux(x, y); };
    r.uy = [uy, scale](double x, double y) { return scale * uy(x, y); };
    r.phi = normalized(r.phi, ic.phase_amplitude, s);
  } else {
    if (!channel) {
      throw Error(ErrorKind::UnsupportedGeometry,
                  "ic.recipe: channel_shear_layer is a channel recipe");
    }
    r = shear_layer(ic, s, params);
  }

  State st;
  st.u = VectorField(ScalarField::from_function(grid, r.ux), ScalarField::from_function(grid, r.uy));
  if (coefficients(params).phase_components == 1) {
    st.phase.push_back(ScalarField::from_function(grid, r.phi));
  } else {
    // Director angle vanishing on the walls of the channel.
    const double a = 2.0 * std::numbers::pi / s.lx;
    const double b = channel ? std::numbers::pi / s.ly : 2.0 * std::numbers::pi / s.ly;
    const double P = ic.phase_amplitude;
    const double base = std::atan2(params.wall_director[1], params.wall_director[0]);
    auto theta = [=](double x, double y) {
      return base + P * std::cos(a * x) * (channel ? std::sin(b * y) : std::cos(b * y));
    };
    st.phase.push_back(
        ScalarField::from_function(grid, [&](double x, double y) { return std::cos(theta(x, y)); }));
    st.phase.push_back(
        ScalarField::from_function(grid, [&](double x, double y) { return std::sin(theta(x, y)); }));
  }
  if (!channel) st.u = leray_project(st.u);
  return prepare_state(std::move(st), params);
}

std::uint64_t state_hash(const State& state) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::span<const double> v) {
    for (double d : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &d, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  };
  mix(state.u.x.values());
  mix(state.u.y.values());
  for (const auto& p : state.phase) mix(p.values());
  return h;
}

}  // namespace nsac
