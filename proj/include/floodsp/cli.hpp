#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace floodsp::cli {

inline constexpr int kSchemaVersion = 1;

/// What every subcommand writes: the parsed configuration, wall time, and the
/// subcommand's own result object.
struct ResultEnvelope {
  int schema_version = kSchemaVersion;
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json timing = nlohmann::json::object();
  nlohmann::json result = nlohmann::json::object();

  bool operator==(const ResultEnvelope&) const = default;
};

nlohmann::json envelope_to_json(const ResultEnvelope& env);
/// Throws std::runtime_error on missing keys or a newer schema version.
ResultEnvelope envelope_from_json(const nlohmann::json& doc);

/// Entry point for the floodsp tool. Returns the process exit code: 0 on
/// success, 1 on errors, 2 when `validate` finds violations.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

}  // namespace floodsp::cli
