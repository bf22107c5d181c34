#pragma once

// Run and sweep configuration.
//
// Text format: one `key = value` per line, `#` starts a comment, lists are
// written `[a, b, c]`. Keys (defaults in brackets):
//
//   grid.geometry        torus | channel                 (required)
//   grid.nx, grid.ny     [64, 64]
//   grid.lx, grid.ly     [2 pi, 2 pi; ly = 1 on the channel]
//   grid.wall_stretch    [0]
//   model.kind           NSAC | EulerAC | MHD | MHDInviscid | LiquidCrystal |
//                        LiquidCrystalInviscid | TransportPhase (required)
//   model.nu [0.01]  model.lambda [0.1]  model.gamma [1]  model.epsilon [0.2]
//   model.s_coupling [1]  model.re [100]  model.rm [1]  model.wall_director [[1, 0]]
//   scheme.kind [IMEX1]  scheme.dt [1e-3]  scheme.cfl_target [0.4]
//   scheme.stabilizer_s0 [2/epsilon^2]
//   ic.recipe [taylor_green]  ic.amplitude [1]  ic.phase_amplitude [0]
//   ic.seed [0]  ic.modes [4]
//   T_final [0.5, required in sweeps]  sample_stride [1]  strip_constant [1]
//   output_dir [out]
//   sweep.nu_ladder      strictly decreasing list (makes the file a sweep config)
//   sweep.pairing        [AgainstInviscid] | AgainstFinest
//   sweep.refined_reference [false]   reference run on a 2x grid
//   sweep.workers        [1]
//
// Environment overrides: NSAC_OUTPUT_DIR, NSAC_WORKERS.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nsac/initial.hpp"
#include "nsac/timestep.hpp"

namespace nsac {

struct RunConfig {
  GridSpec grid;
  ModelParams params;
  SchemeConfig scheme;
  InitialCondition ic;
  double T_final = 0.5;
  int sample_stride = 1;
  double strip_constant = 1.0;
  std::string output_dir = "out";

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

enum class Pairing { AgainstInviscid, AgainstFinest };

std::string to_string(Pairing p);
Pairing pairing_from_string(const std::string& name);

struct SweepConfig {
  RunConfig base;
  std::vector<double> nu_ladder;
  Pairing pairing = Pairing::AgainstInviscid;
  bool refined_reference = false;
  int workers = 1;

  void validate() const;
  bool operator==(const SweepConfig&) const = default;
};

using AnyConfig = std::variant<RunConfig, SweepConfig>;

/// Any error is Error(Config) whose message starts with the offending key.
AnyConfig parse_config(std::string_view text);
RunConfig parse_run_config(std::string_view text);
SweepConfig parse_sweep_config(std::string_view text);
AnyConfig load_config(const std::string& path);

/// Canonical text: every key, fixed order, shortest round-trip numbers.
std::string echo(const RunConfig& c);
std::string echo(const SweepConfig& c);

void apply_env_overrides(RunConfig& c);
void apply_env_overrides(SweepConfig& c);

}  // namespace nsac
