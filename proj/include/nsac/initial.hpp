#pragma once

// Named initial-condition recipes.
//
//   taylor_green        torus: u = A (sin ax cos by, -(a/b) cos ax sin by),
//                       phi = 1 + P cos ax cos by
//   single_mode_phase   u = 0, phi = P cos ax (both geometries)
//   random_bandlimited  divergence-free u and phi from seeded random modes
//                       |k| <= modes, scaled so max|u| = A and max|phi| = P
//   channel_shear_layer channel: u = (A sin(pi y / ly), 0) and a tanh
//                       interface at mid-height displaced by P cos ax
//
// a = 2 pi / lx, b = 2 pi / ly. Vector phases use the director
// (cos theta, sin theta) with theta built from the scalar recipe.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nsac/model.hpp"

namespace nsac {

struct InitialCondition {
  std::string recipe = "taylor_green";
  double amplitude = 1.0;
  double phase_amplitude = 0.0;
  std::uint64_t seed = 0;
  int modes = 4;

  void validate() const;
  bool operator==(const InitialCondition&) const = default;
};

const std::vector<std::string>& initial_condition_names();

/// Builds the state at t = 0 with channel vorticity and wall invariants in place.
State make_initial_state(const InitialCondition& ic, const GridPtr& grid, const ModelParams& params);

/// FNV-1a hash over the raw bits of every field of the state.
std::uint64_t state_hash(const State& state);

/// Uniform doubles in [0, 1) and standard normals from a seeded mt19937_64,
/// converted by hand so the streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace nsac
