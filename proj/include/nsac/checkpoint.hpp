#pragma once

// Binary checkpoints. All integers and floats are little-endian.
//
//   "NSACCKPT"                          8 bytes
//   u32 version
//   u32 geometry, i32 nx, i32 ny, f64 lx, ly, wall_stretch
//   u32 model, f64 nu, lambda, gamma, epsilon, s_coupling, re, rm, d0, d1
//   f64 t
//   u32 field count, then (u32 rows, u32 cols) per field
//   f64 arrays, row-major, in the order ux, uy, phase..., [channel vorticity]

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "nsac/model.hpp"

namespace nsac {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  std::uint32_t version = kCheckpointVersion;
  GridSpec grid;
  ModelParams params;
  double t = 0.0;
  std::vector<std::array<std::uint32_t, 2>> shapes;  ///< (rows = ny, cols = nx)

  std::size_t header_bytes() const;
  std::size_t payload_bytes() const;
};

struct Checkpoint {
  CheckpointHeader header;
  State state;
};

void checkpoint_save(const State& state, const ModelParams& params,
                     const std::filesystem::path& path);
/// Errors: Format (magic, version, enum values), Truncated (size check
/// before parsing, naming expected and actual bytes), Mismatch (field count
/// or shapes inconsistent with the grid and model).
Checkpoint checkpoint_load(const std::filesystem::path& path);
/// As above, and also Mismatch unless the file's grid and model equal the expected ones.
Checkpoint checkpoint_load(const std::filesystem::path& path, const GridSpec& grid,
                           const ModelParams& params);

}  // namespace nsac
