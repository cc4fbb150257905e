#include "kinetics/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "kinetics/errors.hpp"

namespace kinetics {

namespace {

std::uint64_t to_little_endian(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    x = ((x & 0x00000000FFFFFFFFull) << 32) | ((x & 0xFFFFFFFF00000000ull) >> 32);
    x = ((x & 0x0000FFFF0000FFFFull) << 16) | ((x & 0xFFFF0000FFFF0000ull) >> 16);
    x = ((x & 0x00FF00FF00FF00FFull) << 8) | ((x & 0xFF00FF00FF00FF00ull) >> 8);
  }
  return x;
}

}  // namespace

void write_snapshot_payload(std::ostream& out, const nlohmann::json& header,
                            std::span<const double> values) {
  out << header.dump() << '\n';
  for (const double v : values) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, sizeof bytes);
    out.write(bytes, sizeof bytes);
  }
}

nlohmann::json read_snapshot_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("snapshot: missing header line");
  try {
    auto header = nlohmann::json::parse(line);
    if (!header.is_object()) throw InvalidInput("snapshot: header is not a JSON object");
    return header;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(fmt::format("snapshot: malformed header: {}", e.what()));
  }
}

std::vector<double> read_snapshot_values(std::istream& in, std::size_t count) {
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    char bytes[8];
    if (!in.read(bytes, sizeof bytes)) {
      throw InvalidInput(fmt::format("snapshot: payload truncated at value {} of {}", i, count));
    }
    std::uint64_t bits;
    std::memcpy(&bits, bytes, sizeof bits);
    values[i] = std::bit_cast<double>(to_little_endian(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw InvalidInput("snapshot: trailing bytes after payload");
  }
  return values;
}

}  // namespace kinetics
