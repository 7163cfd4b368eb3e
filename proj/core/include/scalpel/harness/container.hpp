#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace scalpel {

/// On-disk layout shared by sequence and checkpoint files:
///
///   bytes 0..11   magic, ASCII, zero padded
///   bytes 12..15  format version, u32 little endian
///   u64 LE        header length N
///   N bytes       JSON header (UTF-8)
///   u64 LE        payload count M
///   8*M bytes     f64 payload, little endian
///   u32 LE        CRC-32 (zlib polynomial) of every preceding byte
struct Container {
  nlohmann::json header;
  std::vector<double> payload;
};

/// Throws IoError when the file cannot be written.
void write_container(const std::filesystem::path& path, std::string_view magic, std::uint32_t version,
                     const Container& container);

/// Throws IoError when the file cannot be read and FormatError on a wrong
/// magic, unsupported version, truncation, bad JSON or checksum mismatch.
Container read_container(const std::filesystem::path& path, std::string_view magic, std::uint32_t version);

}  // namespace scalpel
