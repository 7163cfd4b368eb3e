#include "scalpel/harness/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "scalpel/errors.hpp"

namespace scalpel {

namespace {

constexpr std::size_t kMagicBytes = 12;

void put_le(std::vector<unsigned char>& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>(value >> (8 * i)));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) value |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return value;
}

std::uint32_t crc(const unsigned char* data, std::size_t size) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large buffers in chunks.
  while (size > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    c = crc32(c, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace

void write_container(const std::filesystem::path& path, std::string_view magic, std::uint32_t version,
                     const Container& container) {
  std::vector<unsigned char> bytes(kMagicBytes, 0);
  std::memcpy(bytes.data(), magic.data(), std::min(magic.size(), kMagicBytes));
  put_le(bytes, version, 4);
  const std::string header = container.header.dump();
  put_le(bytes, header.size(), 8);
  bytes.insert(bytes.end(), header.begin(), header.end());
  put_le(bytes, container.payload.size(), 8);
  bytes.reserve(bytes.size() + 8 * container.payload.size() + 4);
  for (double v : container.payload) put_le(bytes, std::bit_cast<std::uint64_t>(v), 8);
  put_le(bytes, crc(bytes.data(), bytes.size()), 4);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Container read_container(const std::filesystem::path& path, std::string_view magic, std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = path.string();

  if (bytes.size() < kMagicBytes + 4 + 8 + 8 + 4) throw FormatError(name + ": file too short");
  char expected[kMagicBytes] = {};
  std::memcpy(expected, magic.data(), std::min(magic.size(), kMagicBytes));
  if (std::memcmp(bytes.data(), expected, kMagicBytes) != 0) throw FormatError(name + ": bad magic");
  const auto file_version = static_cast<std::uint32_t>(get_le(bytes.data() + kMagicBytes, 4));
  if (file_version != version) {
    throw FormatError(name + ": unsupported version " + std::to_string(file_version));
  }

  std::size_t pos = kMagicBytes + 4;
  const std::uint64_t header_len = get_le(bytes.data() + pos, 8);
  pos += 8;
  if (header_len > bytes.size() - pos) throw FormatError(name + ": truncated header");
  const std::string header(bytes.begin() + static_cast<long>(pos), bytes.begin() + static_cast<long>(pos + header_len));
  pos += header_len;
  if (bytes.size() - pos < 12) throw FormatError(name + ": truncated payload");
  const std::uint64_t count = get_le(bytes.data() + pos, 8);
  pos += 8;
  if (count > (bytes.size() - pos - 4) / 8 || pos + 8 * count + 4 != bytes.size()) {
    throw FormatError(name + ": payload length does not match file size");
  }
  const std::uint32_t stored = static_cast<std::uint32_t>(get_le(bytes.data() + bytes.size() - 4, 4));
  if (stored != crc(bytes.data(), bytes.size() - 4)) throw FormatError(name + ": checksum mismatch");

  Container c;
  try {
    c.header = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(name + ": malformed header: " + e.what());
  }
  c.payload.resize(count);
  for (std::size_t i = 0; i < count; ++i) c.payload[i] = std::bit_cast<double>(get_le(bytes.data() + pos + 8 * i, 8));
  return c;
}

}  // namespace scalpel
