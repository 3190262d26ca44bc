#include "dspl/context.hpp"

#include "dspl/error.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

const Value* ContextSnapshot::find(const std::string& path) const {
  auto it = dimensions.find(path);
  return it == dimensions.end() ? nullptr : &it->second;
}

ContextSnapshot apply_event(const ContextSnapshot& snapshot, const ContextEvent& ev) {
  if (ev.tick < snapshot.timestamp) {
    throw OrderError("out_of_order: event at tick " + std::to_string(ev.tick) + " precedes snapshot tick " +
                     std::to_string(snapshot.timestamp));
  }
  if (ev.path.empty()) throw OrderError("event with empty path");
  ContextSnapshot next = snapshot;
  next.timestamp = ev.tick;
  next.dimensions[ev.path] = ev.value;
  return next;
}

std::vector<ContextEvent> preprocess_events(std::span<const ContextEvent> stream) {
  std::vector<ContextEvent> out;
  std::map<std::string, const Value*> last;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& ev = stream[i];
    if (i > 0 && ev.tick < stream[i - 1].tick) {
      throw OrderError("unsorted stream: tick " + std::to_string(ev.tick) + " after " + std::to_string(stream[i - 1].tick));
    }
    auto it = last.find(ev.path);
    if (it != last.end() && *it->second == ev.value) continue;
    out.push_back(ev);
    last[ev.path] = &ev.value;
  }
  return out;
}

ContextSnapshot snapshot_from_json(const json& j, const std::string& where) {
  Fields f(j, where, {"timestamp", "dimensions"});
  ContextSnapshot s;
  s.timestamp = f.has("timestamp") ? f.integer("timestamp") : 0;
  if (const json* d = f.optional("dimensions")) {
    if (!d->is_object()) throw FormatError(f.at("dimensions"), "expected an object of path -> value");
    for (const auto& [path, value] : d->items()) {
      if (path.empty()) throw FormatError(f.at("dimensions"), "empty path");
      s.dimensions.emplace(path, value_from_json(value, f.at("dimensions") + "/" + path));
    }
  }
  return s;
}

json to_json(const ContextSnapshot& snapshot) {
  json dims = json::object();
  for (const auto& [path, value] : snapshot.dimensions) dims[path] = to_json(value);
  return json{{"timestamp", snapshot.timestamp}, {"dimensions", dims}};
}

ContextEvent event_from_json(const json& j, const std::string& where) {
  Fields f(j, where, {"tick", "path", "value"});
  ContextEvent ev{f.integer("tick"), f.string("path"), f.value("value")};
  if (ev.tick < 0) throw FormatError(f.at("tick"), "negative tick");
  if (ev.path.empty()) throw FormatError(f.at("path"), "empty path");
  return ev;
}

json to_json(const ContextEvent& ev) { return json{{"tick", ev.tick}, {"path", ev.path}, {"value", to_json(ev.value)}}; }

std::vector<ContextEvent> parse_events(std::string_view text) {
  json doc = detail::parse_json(text);
  if (!doc.is_array()) throw FormatError("/", "expected an array of events");
  std::vector<ContextEvent> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(event_from_json(doc[i], detail::item_path("", i)));
    if (i > 0 && out[i].tick < out[i - 1].tick) throw FormatError(detail::item_path("", i), "events not sorted by tick");
  }
  return out;
}

json to_json(const ContextChange& change) {
  return json{{"path", change.path},
              {"before", change.before ? to_json(*change.before) : json(nullptr)},
              {"after", to_json(change.after)}};
}

ContextChange change_from_json(const json& j, const std::string& where) {
  Fields f(j, where, {"path", "before", "after"});
  ContextChange c;
  c.path = f.string("path");
  if (f.has("before")) c.before = f.value("before");
  c.after = f.value("after");
  return c;
}

}  // namespace dspl
