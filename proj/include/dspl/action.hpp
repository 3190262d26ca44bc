#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspl/configuration.hpp"
#include "dspl/value.hpp"

namespace dspl {

struct Select {
  std::string feature;
  bool operator==(const Select&) const = default;
};

struct Deselect {
  std::string feature;
  bool operator==(const Deselect&) const = default;
};

struct SetAttribute {
  std::string feature;
  std::string attr;
  Value value;
  bool operator==(const SetAttribute&) const = default;
};

using Action = std::variant<Select, Deselect, SetAttribute>;

const std::string& action_feature(const Action& action);
std::string describe(const Action& action);

nlohmann::json to_json(const Action& action);
Action action_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const std::vector<Action>& actions);

/// Folds the actions over `cfg` in order. Deselect also drops the
/// feature's bindings. No validity check is made.
Configuration apply_actions(Configuration cfg, const std::vector<Action>& actions);

/// Actions turning `from` into `to` over the same model: deselections,
/// then selections, then bindings, each sorted by feature id.
std::vector<Action> diff_actions(const Configuration& from, const Configuration& to);

}  // namespace dspl
