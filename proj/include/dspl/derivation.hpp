#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dspl/configuration.hpp"
#include "dspl/feature_model.hpp"

namespace dspl {

struct ResolvedCommand {
  std::string verb;
  std::vector<std::string> args;
  /// Environment key that must exist before the command may run.
  std::optional<std::string> precondition;

  std::string text() const;
  bool operator==(const ResolvedCommand&) const = default;
};

struct ConfigBundle {
  /// Sorted by key.
  std::map<std::string, std::string> entries;
  /// Pre-order walk of the selected features, template order within each.
  std::vector<ResolvedCommand> script;
  std::string digest;

  /// `key=value` lines.
  std::string conf_text() const;
  /// One space-separated command per line.
  std::string script_text() const;

  bool operator==(const ConfigBundle&) const = default;
};

nlohmann::json to_json(const ConfigBundle& bundle);

/// Renders the artifact templates of the selected features. Throws
/// DerivationError on placeholders without a bound attribute, on one key
/// rendered to two different values, and on malformed rendered tokens.
ConfigBundle derive_bundle(const FeatureModel& fm, const Configuration& cfg);

/// In-memory stand-in for a provider's configuration surface.
struct SimEnvironment {
  std::string provider_id;
  std::map<std::string, std::string> applied;
  std::vector<std::string> command_log;

  bool operator==(const SimEnvironment&) const = default;
};

nlohmann::json to_json(const SimEnvironment& env);

struct ExecutionReport {
  bool ok = true;
  std::optional<std::size_t> failed_index;
  std::optional<std::string> failed_command;

  bool operator==(const ExecutionReport&) const = default;
};

nlohmann::json to_json(const ExecutionReport& report);
ExecutionReport execution_report_from_json(const nlohmann::json& j, const std::string& where);

/// Applies the entries, then runs the script in order. A command whose
/// precondition key is absent fails and the environment is restored to
/// its state before the call.
ExecutionReport run_bundle(SimEnvironment& env, const ConfigBundle& bundle);

/// The environment holds exactly the bundle's entries on the bundle's keys.
bool verify_environment(const SimEnvironment& env, const ConfigBundle& bundle);

/// Writes `<name>.conf` and `<name>.script` into `dir`.
void write_bundle(const std::filesystem::path& dir, const std::string& name, const ConfigBundle& bundle);

}  // namespace dspl
