#include "nsac/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "nsac/error.hpp"

namespace nsac {

namespace {

constexpr char kMagic[8] = {'N', 'S', 'A', 'C', 'C', 'K', 'P', 'T'};
constexpr std::size_t kFixedBytes = 8 + 4 + (4 + 4 + 4 + 3 * 8) + (4 + 9 * 8) + 8 + 4;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) buf_.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
  }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& buf) : buf_(buf) {}
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t(byte()) << (8 * b);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t(byte()) << (8 * b);
    return std::bit_cast<double>(v);
  }
  void skip(std::size_t n) { pos_ += n; }

 private:
  unsigned char byte() {
    if (pos_ >= buf_.size()) throw Error(ErrorKind::Truncated, "checkpoint: unexpected end of file");
    return static_cast<unsigned char>(buf_[pos_++]);
  }
  const std::string& buf_;
  std::size_t pos_ = 0;
};

std::size_t expected_fields(const GridSpec& g, const ModelParams& p) {
  return 2 + coefficients(p).phase_components + (g.geometry == Geometry::Channel ? 1 : 0);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "checkpoint: cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

std::size_t CheckpointHeader::header_bytes() const { return kFixedBytes + 8 * shapes.size(); }

std::size_t CheckpointHeader::payload_bytes() const {
  std::size_t n = 0;
  for (const auto& s : shapes) n += std::size_t(s[0]) * s[1] * 8;
  return n;
}

void checkpoint_save(const State& state, const ModelParams& params,
                     const std::filesystem::path& path) {
  const Grid& g = *state.grid();
  std::vector<const ScalarField*> fields{&state.u.x, &state.u.y};
  for (const auto& p : state.phase) fields.push_back(&p);
  if (g.is_channel()) fields.push_back(&state.vorticity);

  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  const GridSpec& s = g.spec();
  w.u32(static_cast<std::uint32_t>(s.geometry));
  w.i32(s.nx);
  w.i32(s.ny);
  w.f64(s.lx);
  w.f64(s.ly);
  w.f64(s.wall_stretch);
  w.u32(static_cast<std::uint32_t>(params.model));
  for (double v : {params.nu, params.lambda, params.gamma, params.epsilon, params.s_coupling,
                   params.re, params.rm, params.wall_director[0], params.wall_director[1]}) {
    w.f64(v);
  }
  w.f64(state.t);
  w.u32(static_cast<std::uint32_t>(fields.size()));
  for (const ScalarField* f : fields) {
    if (f->size() != static_cast<std::size_t>(s.nx) * s.ny) {
      throw Error(ErrorKind::Mismatch, "checkpoint_save: field size does not match the grid");
    }
    w.u32(static_cast<std::uint32_t>(s.ny));
    w.u32(static_cast<std::uint32_t>(s.nx));
  }
  for (const ScalarField* f : fields) {
    for (double v : f->values()) w.f64(v);
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "checkpoint: cannot open " + path.string() + " for writing");
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  if (!out) throw Error(ErrorKind::Io, "checkpoint: write failed for " + path.string());
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  const std::string buf = read_file(path);
  const std::string name = path.string();
  if (buf.size() < sizeof kMagic || std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::Format, "checkpoint: bad magic tag in " + name);
  }
  if (buf.size() < kFixedBytes) {
    throw Error(ErrorKind::Truncated, "checkpoint: header truncated, expected at least " +
                                          std::to_string(kFixedBytes) + " bytes, got " +
                                          std::to_string(buf.size()));
  }
  Reader r(buf);
  r.skip(sizeof kMagic);
  CheckpointHeader h;
  h.version = r.u32();
  if (h.version != kCheckpointVersion) {
    throw Error(ErrorKind::Format, "checkpoint: unsupported version " + std::to_string(h.version) +
                                       " (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint32_t geom = r.u32();
  if (geom > 1) throw Error(ErrorKind::Format, "checkpoint: bad geometry tag " + std::to_string(geom));
  h.grid.geometry = static_cast<Geometry>(geom);
  h.grid.nx = r.i32();
  h.grid.ny = r.i32();
  h.grid.lx = r.f64();
  h.grid.ly = r.f64();
  h.grid.wall_stretch = r.f64();
  const std::uint32_t kind = r.u32();
  if (kind > static_cast<std::uint32_t>(ModelKind::TransportPhase)) {
    throw Error(ErrorKind::Format, "checkpoint: bad model tag " + std::to_string(kind));
  }
  h.params.model = static_cast<ModelKind>(kind);
  h.params.nu = r.f64();
  h.params.lambda = r.f64();
  h.params.gamma = r.f64();
  h.params.epsilon = r.f64();
  h.params.s_coupling = r.f64();
  h.params.re = r.f64();
  h.params.rm = r.f64();
  h.params.wall_director[0] = r.f64();
  h.params.wall_director[1] = r.f64();
  h.t = r.f64();
  const std::uint32_t count = r.u32();
  if (count > 64) throw Error(ErrorKind::Format, "checkpoint: implausible field count " + std::to_string(count));
  const std::size_t shape_end = kFixedBytes + 8 * std::size_t(count);
  if (buf.size() < shape_end) {
    throw Error(ErrorKind::Truncated, "checkpoint: header truncated, expected at least " +
                                          std::to_string(shape_end) + " bytes, got " +
                                          std::to_string(buf.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    h.shapes.push_back({rows, cols});
  }
  const std::size_t expected = h.header_bytes() + h.payload_bytes();
  if (buf.size() != expected) {
    throw Error(ErrorKind::Truncated, "checkpoint: expected " + std::to_string(expected) +
                                          " bytes, got " + std::to_string(buf.size()));
  }

  try {
    h.grid.validate();
    h.params.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, std::string("checkpoint: ") + e.what());
  }
  if (count != expected_fields(h.grid, h.params)) {
    throw Error(ErrorKind::Mismatch, "checkpoint: " + std::to_string(count) + " fields, model " +
                                         to_string(h.params.model) + " on this grid needs " +
                                         std::to_string(expected_fields(h.grid, h.params)));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    if (h.shapes[i][0] != static_cast<std::uint32_t>(h.grid.ny) ||
        h.shapes[i][1] != static_cast<std::uint32_t>(h.grid.nx)) {
      throw Error(ErrorKind::Mismatch, "checkpoint: field " + std::to_string(i) + " has shape " +
                                           std::to_string(h.shapes[i][0]) + "x" +
                                           std::to_string(h.shapes[i][1]) + ", grid is " +
                                           std::to_string(h.grid.ny) + "x" +
                                           std::to_string(h.grid.nx));
    }
  }

  auto grid = build_grid(h.grid);
  auto next = [&] {
    ScalarField f(grid);
    for (double& v : f.values()) v = r.f64();
    return f;
  };
  Checkpoint c;
  c.state.t = h.t;
  ScalarField ux = next();
  ScalarField uy = next();
  c.state.u = VectorField(std::move(ux), std::move(uy));
  for (int k = 0; k < coefficients(h.params).phase_components; ++k) c.state.phase.push_back(next());
  if (h.grid.geometry == Geometry::Channel) c.state.vorticity = next();
  c.header = std::move(h);
  return c;
}

Checkpoint checkpoint_load(const std::filesystem::path& path, const GridSpec& grid,
                           const ModelParams& params) {
  Checkpoint c = checkpoint_load(path);
  if (!(c.header.grid == grid)) {
    throw Error(ErrorKind::Mismatch, "checkpoint: grid in " + path.string() +
                                         " differs from the configured grid");
  }
  if (!(c.header.params == params)) {
    throw Error(ErrorKind::Mismatch, "checkpoint: model in " + path.string() +
                                         " differs from the configured model");
  }
  return c;
}

}  // namespace nsac
