#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dsreg/ground_state.hpp"
#include "dsreg/stepper.hpp"

namespace dsreg {

// ---------------------------------------------------------------- snapshots
//
// Layout (little-endian):
//   "DSA1"  u16 version  u64 nx  u64 ny  f64 lx  f64 ly  f64 t  u8 tag
//   f64 beta  f64 rho  f64 nu  f64 alpha
// followed by nx*ny (re, im) f64 pairs in grid order (i * ny + j).
// tag 0..3 is the model kind of a wave field; tag 16 marks a ground state,
// stored as S + i X.

inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 79;
inline constexpr std::uint8_t kGroundStateTag = 16;

struct Snapshot {
  ComplexField field;
  double t = 0.0;
  std::uint8_t tag = 0;
  ModelSpec spec;

  bool is_ground_state() const { return tag == kGroundStateTag; }
};

namespace detail {

inline void put_bytes(std::vector<unsigned char>& buf, const void* p, std::size_t n) {
  const auto* c = static_cast<const unsigned char*>(p);
  if constexpr (std::endian::native == std::endian::little) {
    buf.insert(buf.end(), c, c + n);
  } else {
    for (std::size_t k = n; k > 0; --k) buf.push_back(c[k - 1]);
  }
}

template <typename T>
void put(std::vector<unsigned char>& buf, T v) {
  put_bytes(buf, &v, sizeof v);
}

template <typename T>
T get(const unsigned char* p) {
  T v;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&v, p, sizeof v);
  } else {
    unsigned char tmp[sizeof(T)];
    for (std::size_t k = 0; k < sizeof(T); ++k) tmp[k] = p[sizeof(T) - 1 - k];
    std::memcpy(&v, tmp, sizeof v);
  }
  return v;
}

inline std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const void* data, std::size_t n) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace detail

inline std::uint8_t model_tag(ModelKind k) { return static_cast<std::uint8_t>(k); }

inline void write_snapshot(const std::string& path, const ComplexField& v, double t, const ModelSpec& spec,
                           std::uint8_t tag) {
  require_space(v.space(), Space::physical, "write_snapshot");
  const Grid2D& g = v.grid();
  std::vector<unsigned char> buf;
  buf.reserve(kSnapshotHeaderBytes + 16 * g.size());
  buf.insert(buf.end(), {'D', 'S', 'A', '1'});
  detail::put<std::uint16_t>(buf, kSnapshotVersion);
  detail::put<std::uint64_t>(buf, g.nx());
  detail::put<std::uint64_t>(buf, g.ny());
  detail::put<double>(buf, g.lx());
  detail::put<double>(buf, g.ly());
  detail::put<double>(buf, t);
  detail::put<std::uint8_t>(buf, tag);
  detail::put<double>(buf, spec.beta);
  detail::put<double>(buf, spec.rho);
  detail::put<double>(buf, spec.nu);
  detail::put<double>(buf, spec.alpha);
  for (const auto& z : v.values()) {
    detail::put<double>(buf, z.real());
    detail::put<double>(buf, z.imag());
  }
  detail::write_file(path, buf.data(), buf.size());
}

inline void write_snapshot(const std::string& path, const ComplexField& v, double t, const ModelSpec& spec) {
  write_snapshot(path, v, t, spec, model_tag(spec.kind));
}

inline Snapshot read_snapshot(const std::string& path) {
  const auto bytes = detail::read_file(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "DSA1", 4) != 0) {
    throw FormatError("'" + path + "' is not a snapshot (bad magic)");
  }
  if (bytes.size() < kSnapshotHeaderBytes) {
    throw TruncationError("'" + path + "' header truncated: expected " + std::to_string(kSnapshotHeaderBytes) +
                              " bytes, found " + std::to_string(bytes.size()),
                          kSnapshotHeaderBytes, bytes.size());
  }
  const unsigned char* p = bytes.data() + 4;
  const auto version = detail::get<std::uint16_t>(p);
  if (version != kSnapshotVersion) {
    throw VersionError("'" + path + "' has snapshot version " + std::to_string(version) + ", expected " +
                       std::to_string(kSnapshotVersion));
  }
  const auto nx = detail::get<std::uint64_t>(p + 2);
  const auto ny = detail::get<std::uint64_t>(p + 10);
  const double lx = detail::get<double>(p + 18);
  const double ly = detail::get<double>(p + 26);
  Snapshot s;
  s.t = detail::get<double>(p + 34);
  s.tag = detail::get<std::uint8_t>(p + 42);
  s.spec.beta = detail::get<double>(p + 43);
  s.spec.rho = detail::get<double>(p + 51);
  s.spec.nu = detail::get<double>(p + 59);
  s.spec.alpha = detail::get<double>(p + 67);
  if (s.tag > 3 && s.tag != kGroundStateTag) {
    throw FormatError("'" + path + "' has unknown model tag " + std::to_string(s.tag));
  }
  s.spec.kind = s.tag == kGroundStateTag ? ModelKind::dse : static_cast<ModelKind>(s.tag);
  if (nx > (1u << 20) || ny > (1u << 20)) throw FormatError("'" + path + "' has implausible grid size");
  const std::size_t expected = kSnapshotHeaderBytes + 16 * nx * ny;
  if (bytes.size() < expected) {
    throw TruncationError("'" + path + "' truncated: expected " + std::to_string(expected) + " bytes, found " +
                              std::to_string(bytes.size()),
                          expected, bytes.size());
  }
  if (bytes.size() > expected) {
    throw FormatError("'" + path + "' has " + std::to_string(bytes.size() - expected) + " trailing bytes");
  }
  GridPtr grid;
  try {
    grid = make_grid(nx, ny, lx, ly);
  } catch (const ParameterError& e) {
    throw FormatError("'" + path + "' has an invalid grid: " + e.what());
  }
  s.field = ComplexField(grid);
  const unsigned char* d = bytes.data() + kSnapshotHeaderBytes;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    s.field[k] = cplx(detail::get<double>(d + 16 * k), detail::get<double>(d + 16 * k + 8));
  }
  return s;
}

inline void write_ground_state(const std::string& path, const GroundState& gs) {
  ComplexField f(gs.S.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = cplx(gs.S[k], gs.X[k]);
  write_snapshot(path, f, 0.0, ModelSpec{ModelKind::dse, gs.beta, gs.rho, gs.nu, 0.0}, kGroundStateTag);
}

/// Rebuilds a ground state (and its metadata) from a tag-16 snapshot.
inline GroundState read_ground_state(const std::string& path) {
  Snapshot s = read_snapshot(path);
  if (!s.is_ground_state()) throw FormatError("'" + path + "' does not hold a ground state");
  RealField S = real_part(s.field);
  GroundState gs = make_ground_state(std::move(S), s.spec.beta, s.spec.rho, s.spec.nu);
  for (std::size_t k = 0; k < gs.X.size(); ++k) gs.X[k] = s.field[k].imag();
  gs.residual = residual_norm(gs.S, gs.X, gs.beta, gs.rho, gs.nu);
  return gs;
}

// ---------------------------------------------------------------- diagnostics CSV

inline constexpr const char* kDiagnosticsHeader = "t,dt,mass,hamiltonian,grad_norm,max_amp,L_est";

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_record(const DiagnosticsRecord& r) {
  return format_g17(r.t) + "," + format_g17(r.dt) + "," + format_g17(r.mass) + "," + format_g17(r.hamiltonian) +
         "," + format_g17(r.grad_norm) + "," + format_g17(r.max_amp) + "," + format_g17(r.L_est);
}

/// Line-buffered diagnostics writer; every record is flushed so a crashed
/// run leaves a readable prefix.
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(const std::string& path, bool append = false) : path_(path) {
    const bool fresh = !append || !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    f_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!f_) throw IoError("cannot write '" + path + "'");
    if (fresh) f_ << kDiagnosticsHeader << '\n';
    f_.flush();
  }

  void write(const DiagnosticsRecord& r) {
    f_ << format_record(r) << '\n';
    f_.flush();
    if (!f_) throw IoError("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ofstream f_;
};

inline void write_diagnostics(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  DiagnosticsWriter w(path);
  for (const auto& r : records) w.write(r);
}

inline std::vector<DiagnosticsRecord> read_diagnostics(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line != kDiagnosticsHeader) {
    throw FormatError("'" + path + "' does not start with the diagnostics header");
  }
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[7];
    std::istringstream ss(line);
    std::string cell;
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n == 7) break;
      char* end = nullptr;
      v[n] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw FormatError("'" + path + "' line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      ++n;
    }
    if (n != 7) throw FormatError("'" + path + "' line " + std::to_string(lineno) + ": expected 7 columns");
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return out;
}

}  // namespace dsreg
