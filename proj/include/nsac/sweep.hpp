#pragma once

// Viscosity sweeps and rate fits.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nsac/config.hpp"
#include "nsac/csv.hpp"

namespace nsac {

struct SweepSeries {
  std::vector<double> times;
  std::vector<double> vel_l2;
  std::vector<double> phase_h1;
  std::vector<double> error_sq;        ///< vel_l2^2 + lambda phase_h1^2
  std::vector<double> kato_integrand;  ///< nu |grad u|^2 on the strip; empty on the torus
};

struct SweepRow {
  std::size_t index = 0;
  double nu = 0.0;
  double error = 0.0;     ///< sqrt(error_sq)
  double error_sq = 0.0;  ///< sup over samples of vel_l2^2 + lambda phase_h1^2
  double sup_vel_l2 = 0.0;
  double sup_phase_h1 = 0.0;
  double kato = 0.0;      ///< 0 on the torus
  std::size_t steps = 0;
  std::uint64_t ic_hash = 0;
  std::uint64_t ref_ic_hash = 0;
  double runtime_s = 0.0;
  SweepSeries series;
};

struct ReferenceInfo {
  ModelParams params;
  std::size_t steps = 0;
  double runtime_s = 0.0;
  double initial_grad_linf = 0.0;
  double sup_grad_linf = 0.0;
  /// Finite and sup |grad v| stayed below 100x its initial value.
  bool smooth = false;
};

struct SweepResult {
  SweepConfig config;
  ReferenceInfo reference;
  std::vector<SweepRow> rows;  ///< ladder order
};

/// Runs the reference and one viscous run per ladder entry (workers from
/// the config). All runs use fixed dt = scheme.dt so samples line up. If a
/// member fails and `persist_dir` is non-empty, the finished rows are written
/// there before the error is rethrown.
SweepResult viscosity_sweep(const SweepConfig& cfg, const std::filesystem::path& persist_dir = {});

/// Grid with twice the resolution whose nodes contain the original nodes.
GridSpec refined_spec(const GridSpec& spec);
/// Injection of a state on a refined grid onto the nested coarse nodes.
State restrict_state(const State& fine, const GridPtr& coarse);

CsvTable sweep_table_csv(const SweepResult& r, const std::string& status = "complete");
CsvTable sweep_series_csv(const SweepResult& r);
void write_sweep_outputs(const SweepResult& r, const std::filesystem::path& dir,
                         const std::string& status = "complete");

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;  ///< natural log
  double r_squared = 0.0;
  std::vector<double> nus;     ///< points used
  std::vector<double> errors;
  std::size_t dropped = 0;     ///< non-positive or non-finite pairs skipped
};

/// OLS of log(error) on log(nu) over finite positive pairs; needs >= 4 of them.
RateFit rate_fit(std::span<const double> nus, std::span<const double> errors);
/// `column` is "error" (default metric) or "error_sq".
RateFit rate_fit(const SweepResult& r, const std::string& column = "error");
RateFit rate_fit(const CsvTable& sweep_table, const std::string& column = "error");
CsvTable rate_fit_csv(const RateFit& f);

}  // namespace nsac
