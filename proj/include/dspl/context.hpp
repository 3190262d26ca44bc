#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/value.hpp"

namespace dspl {

/// Consumer state at a logical tick. Paths live under `user.*`,
/// `device.*` and `situation.*`.
struct ContextSnapshot {
  std::int64_t timestamp = 0;
  std::map<std::string, Value> dimensions;

  const Value* find(const std::string& path) const;
  bool operator==(const ContextSnapshot&) const = default;
};

struct ContextEvent {
  std::int64_t tick = 0;
  std::string path;
  Value value;

  bool operator==(const ContextEvent&) const = default;
};

/// One path whose value differs before and after a tick.
struct ContextChange {
  std::string path;
  std::optional<Value> before;
  Value after;

  bool operator==(const ContextChange&) const = default;
};

/// Throws OrderError when the event is older than the snapshot.
ContextSnapshot apply_event(const ContextSnapshot& snapshot, const ContextEvent& ev);

/// Drops events that repeat the value of the previous surviving event on
/// the same path. Throws OrderError on an unsorted stream.
std::vector<ContextEvent> preprocess_events(std::span<const ContextEvent> stream);

ContextSnapshot snapshot_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const ContextSnapshot& snapshot);
ContextEvent event_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const ContextEvent& ev);
/// Event stream file: a JSON array of events sorted by tick.
std::vector<ContextEvent> parse_events(std::string_view text);
nlohmann::json to_json(const ContextChange& change);
ContextChange change_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace dspl
