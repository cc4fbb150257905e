#pragma once

// Binary snapshot container shared by the velocity-space and phase-space
// grids: a single line of JSON, '\n', then raw little-endian float64 values.

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace kinetics {

void write_snapshot_payload(std::ostream& out, const nlohmann::json& header,
                            std::span<const double> values);

nlohmann::json read_snapshot_header(std::istream& in);
std::vector<double> read_snapshot_values(std::istream& in, std::size_t count);

/// Reads the header line and exactly `count_from_header(header)` values.
/// Throws InvalidInput on a malformed header or a short payload.
template <class CountFn>
std::pair<nlohmann::json, std::vector<double>> read_snapshot_payload(std::istream& in,
                                                                     CountFn count_from_header) {
  nlohmann::json header = read_snapshot_header(in);
  std::vector<double> values = read_snapshot_values(in, count_from_header(header));
  return {std::move(header), std::move(values)};
}

}  // namespace kinetics
