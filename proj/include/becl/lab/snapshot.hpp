#pragma once

// Binary many-body snapshots.
//
//   "BECL" | u32 version | u32 metadata length | metadata (UTF-8 JSON)
//   | u64 element count | count x (f64 re, f64 im) | u32 CRC-32 of the payload
//
// All integers and floats are little-endian. Amplitudes are stored in the
// state's native order: slot-major, then x row, x column, Hermite mode.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "becl/manybody/state.hpp"

namespace becl::lab {

inline constexpr std::uint32_t kSnapshotVersion = 1;

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
void put_le(std::string& out, T v) {
  std::uint64_t bits = 0;
  if constexpr (std::is_floating_point_v<T>) {
    bits = std::bit_cast<std::uint64_t>(v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos, const char* what) {
  if (pos + sizeof(T) > in.size()) throw SnapshotError(std::string("snapshot truncated while reading ") + what);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

inline std::uint32_t crc32_of(const char* data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, reinterpret_cast<const Bytef*>(data), chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace detail

struct Snapshot {
  ManyBodyState state;
  nlohmann::json metadata;
};

inline nlohmann::json snapshot_metadata(const ManyBodyState& s, double omega, double beta) {
  const auto& sp = s.space();
  nlohmann::json m;
  m["grid_points"] = sp.grid.n;
  m["half_length"] = sp.grid.half_length;
  m["hermite_modes"] = sp.modes;
  m["particles"] = s.particles();
  m["omega"] = omega;
  m["beta"] = beta;
  m["time"] = s.time;
  m["norm"] = s.norm();
  m["symmetric"] = s.symmetric;
  m["element_count"] = s.amplitudes().size();
  m["layout"] = "particle-slot, x-row, x-col, hermite-mode";
  return m;
}

inline std::string encode_snapshot(const ManyBodyState& s, double omega = 0.0, double beta = 0.0) {
  const std::string meta = snapshot_metadata(s, omega, beta).dump();
  std::string out = "BECL";
  detail::put_le<std::uint32_t>(out, kSnapshotVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  const auto& a = s.amplitudes();
  detail::put_le<std::uint64_t>(out, a.size());
  const std::size_t payload_start = out.size();
  out.reserve(out.size() + 16 * a.size() + 4);
  for (const auto& z : a) {
    detail::put_le<double>(out, z.real());
    detail::put_le<double>(out, z.imag());
  }
  detail::put_le<std::uint32_t>(out, detail::crc32_of(out.data() + payload_start, out.size() - payload_start));
  return out;
}

inline Snapshot decode_snapshot(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "BECL") != 0) throw SnapshotError("not a snapshot file (bad magic)");
  std::size_t pos = 4;
  const auto version = detail::get_le<std::uint32_t>(bytes, pos, "version");
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " (expected " +
                        std::to_string(kSnapshotVersion) + ")");
  }
  const auto meta_len = detail::get_le<std::uint32_t>(bytes, pos, "metadata length");
  if (pos + meta_len > bytes.size()) throw SnapshotError("snapshot truncated inside the metadata block");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(bytes.substr(pos, meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("snapshot metadata is not valid JSON: ") + e.what());
  }
  pos += meta_len;
  const auto count = detail::get_le<std::uint64_t>(bytes, pos, "element count");
  if (count > (bytes.size() - pos) / 16) throw SnapshotError("snapshot payload truncated");
  const std::size_t payload_bytes = static_cast<std::size_t>(count) * 16;
  if (bytes.size() - pos != payload_bytes + 4) {
    throw SnapshotError(bytes.size() - pos < payload_bytes + 4 ? "snapshot truncated before the checksum"
                                                               : "trailing bytes after the snapshot checksum");
  }
  const std::uint32_t crc = detail::crc32_of(bytes.data() + pos, payload_bytes);
  std::size_t tail = pos + payload_bytes;
  if (detail::get_le<std::uint32_t>(bytes, tail, "checksum") != crc) throw SnapshotError("snapshot checksum mismatch");

  try {
    const OneBodySpace space{PeriodicGrid2D(meta.at("grid_points").get<int>(), meta.at("half_length").get<double>()),
                             meta.at("hermite_modes").get<int>()};
    ManyBodyState s(space, meta.at("particles").get<int>());
    if (s.amplitudes().size() != count) throw SnapshotError("snapshot element count disagrees with its dimensions");
    for (auto& z : s.amplitudes()) {
      const double re = detail::get_le<double>(bytes, pos, "payload");
      const double im = detail::get_le<double>(bytes, pos, "payload");
      z = cplx(re, im);
    }
    s.time = meta.at("time").get<double>();
    s.symmetric = meta.at("symmetric").get<bool>();
    const double stored = meta.at("norm").get<double>();
    if (std::abs(stored - s.norm()) > 1e-12) throw SnapshotError("snapshot norm field disagrees with the payload");
    return Snapshot{std::move(s), std::move(meta)};
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("snapshot metadata incomplete: ") + e.what());
  }
}

inline void save_snapshot(const ManyBodyState& s, const std::filesystem::path& path, double omega = 0.0,
                          double beta = 0.0) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("cannot open '" + path.string() + "' for writing");
  const std::string bytes = encode_snapshot(s, omega, beta);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f.flush()) throw SnapshotError("write to '" + path.string() + "' failed");
}

inline Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SnapshotError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace becl::lab
