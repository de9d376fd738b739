#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace spa::raw_io {

/// Appends little-endian IEEE-754 float32 bytes.
inline void append_f32_le(std::string& out, std::span<const float> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * 4);
  char* dst = out.data() + start;
  for (float v : values) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) {
      bits = (bits >> 24) | ((bits >> 8) & 0xFF00u) | ((bits << 8) & 0xFF0000u) | (bits << 24);
    }
    std::memcpy(dst, &bits, 4);
    dst += 4;
  }
}

inline void read_f32_le(const char* src, std::span<float> values) {
  for (float& v : values) {
    std::uint32_t bits;
    std::memcpy(&bits, src, 4);
    if constexpr (std::endian::native == std::endian::big) {
      bits = (bits >> 24) | ((bits >> 8) & 0xFF00u) | ((bits << 8) & 0xFF0000u) | (bits << 24);
    }
    v = std::bit_cast<float>(bits);
    src += 4;
  }
}

/// Whole-file helpers. Both throw DataError(Io) on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

std::uint32_t crc32(std::string_view bytes);

/// 64-bit FNV-1a; stable across platforms, used for config digests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace spa::raw_io
