#pragma once

#include <zlib.h>

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "kgnet/error.hpp"

namespace kgnet::util {

/// Minimal zip archive of uncompressed (stored) entries. Entries are written
/// in path order with a fixed 1980-01-01 timestamp, so equal inputs give
/// byte-identical archives.
namespace zip {

namespace detail {
inline void put16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>(v >> 8);
}
inline void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}
inline std::uint16_t get16(std::string_view s, std::size_t at) {
  if (at + 2 > s.size()) throw IoError("zip: truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}
inline std::uint32_t get32(std::string_view s, std::size_t at) {
  if (at + 4 > s.size()) throw IoError("zip: truncated archive");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}
inline std::uint32_t crc(std::string_view data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
}  // namespace detail

inline std::string write(const std::map<std::string, std::string>& files) {
  using namespace detail;
  std::string out, central;
  for (const auto& [path, data] : files) {
    if (data.size() > 0xFFFFFFFEu || out.size() > 0xFFFFFFFEu) throw IoError("zip: entry too large");
    const std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    const std::uint32_t c = crc(data);
    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0);
    put16(out, 0);  // stored
    put16(out, 0);
    put16(out, kDosDate);
    put32(out, c);
    put32(out, static_cast<std::uint32_t>(data.size()));
    put32(out, static_cast<std::uint32_t>(data.size()));
    put16(out, static_cast<std::uint16_t>(path.size()));
    put16(out, 0);
    out += path;
    out += data;

    put32(central, 0x02014b50);
    put16(central, 20);
    put16(central, 20);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, c);
    put32(central, static_cast<std::uint32_t>(data.size()));
    put32(central, static_cast<std::uint32_t>(data.size()));
    put16(central, static_cast<std::uint16_t>(path.size()));
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0);
    put32(central, offset);
    central += path;
  }
  const std::uint32_t central_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(files.size()));
  put16(out, static_cast<std::uint16_t>(files.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);
  return out;
}

/// Reads a stored-only archive via its central directory; verifies CRCs.
inline std::map<std::string, std::string> read(std::string_view archive) {
  using namespace detail;
  if (archive.size() < 22) throw IoError("zip: archive too small");
  std::size_t eocd = archive.size() - 22;
  while (get32(archive, eocd) != 0x06054b50) {
    if (eocd == 0 || archive.size() - eocd > 22 + 0xFFFF) throw IoError("zip: no end of central directory");
    --eocd;
  }
  const std::uint16_t count = get16(archive, eocd + 10);
  std::size_t at = get32(archive, eocd + 16);
  std::map<std::string, std::string> files;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (get32(archive, at) != 0x02014b50) throw IoError("zip: bad central directory entry");
    const std::uint16_t method = get16(archive, at + 10);
    const std::uint32_t c = get32(archive, at + 16);
    const std::uint32_t size = get32(archive, at + 20);
    const std::uint16_t name_len = get16(archive, at + 28);
    const std::uint16_t extra_len = get16(archive, at + 30);
    const std::uint16_t comment_len = get16(archive, at + 32);
    const std::uint32_t local = get32(archive, at + 42);
    if (at + 46 + name_len > archive.size()) throw IoError("zip: truncated central directory");
    std::string name(archive.substr(at + 46, name_len));
    if (method != 0) throw IoError("zip: entry '" + name + "' is compressed; only stored entries are supported");
    if (get32(archive, local) != 0x04034b50) throw IoError("zip: bad local header for '" + name + "'");
    const std::size_t data_at = local + 30 + get16(archive, local + 26) + get16(archive, local + 28);
    if (data_at + size > archive.size()) throw IoError("zip: truncated entry '" + name + "'");
    std::string data(archive.substr(data_at, size));
    if (crc(data) != c) throw IoError("zip: CRC mismatch in '" + name + "'");
    files.emplace(std::move(name), std::move(data));
    at += 46 + name_len + extra_len + comment_len;
  }
  return files;
}

}  // namespace zip

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgnet::util
