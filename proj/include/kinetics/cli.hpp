#pragma once

// Batch front end: one JSON object per run.
//
//   {
//     "subcommand": "dsmc",            // optional when given on the command line
//     "seed": 7,                       // optional
//     "output_dir": "out",             // optional
//     "parameters": { "dt": 1e-5 }     // optional; missing keys take defaults
//   }
//
// Parsing is strict: any key absent from the subcommand's defaults is
// rejected. The resolved configuration (defaults filled in) is echoed to
// config_echo.json next to the outputs and re-parses to an equal RunConfig.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace kinetics::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240521;
inline constexpr const char* kEchoFile = "config_echo.json";

struct RunConfig {
  std::string subcommand;
  nlohmann::json parameters;  // fully resolved
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path output_dir = "kinetics_out";

  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& subcommands();

/// Default parameters of a subcommand. Throws ValidationError for an unknown
/// subcommand.
nlohmann::json default_parameters(const std::string& subcommand);

/// Throws ParseError (malformed JSON; carries the 1-based line) or
/// ValidationError (unknown key, wrong type or out-of-range value; carries
/// the dotted key path). `subcommand` fills in or must match the one in text.
RunConfig parse_config(std::string_view text, std::optional<std::string> subcommand = std::nullopt);

nlohmann::json to_json(const RunConfig& config);
std::string echo_text(const RunConfig& config);

/// Files a successful run writes, in memory. Deterministic given config.
struct RunOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, content
};

/// Executes the subcommand without touching the filesystem. Throws
/// InvalidInput or NumericalFailure.
RunOutput execute(const RunConfig& config);

/// execute() then write every file (and the config echo) atomically into
/// output_dir. Returns 0 on success, 1 on invalid input, 2 on numerical
/// failure; diagnostics go to stderr. Nothing is written unless the
/// computation succeeded.
int run(const RunConfig& config);

}  // namespace kinetics::cli
