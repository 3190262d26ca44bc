#include "dspl/action.hpp"

#include "dspl/error.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

const std::string& action_feature(const Action& action) {
  return std::visit([](const auto& a) -> const std::string& { return a.feature; }, action);
}

std::string describe(const Action& action) {
  if (const auto* s = std::get_if<Select>(&action)) return "select " + s->feature;
  if (const auto* d = std::get_if<Deselect>(&action)) return "deselect " + d->feature;
  const auto& set = std::get<SetAttribute>(action);
  return "set " + set.feature + "." + set.attr + " = " + to_string(set.value);
}

json to_json(const Action& action) {
  if (const auto* s = std::get_if<Select>(&action)) return json{{"op", "select"}, {"feature", s->feature}};
  if (const auto* d = std::get_if<Deselect>(&action)) return json{{"op", "deselect"}, {"feature", d->feature}};
  const auto& set = std::get<SetAttribute>(action);
  return json{{"op", "set_attribute"}, {"feature", set.feature}, {"attr", set.attr}, {"value", to_json(set.value)}};
}

json to_json(const std::vector<Action>& actions) {
  json out = json::array();
  for (const auto& a : actions) out.push_back(to_json(a));
  return out;
}

Action action_from_json(const json& j, const std::string& where) {
  Fields f(j, where, {"op", "feature", "attr", "value"});
  auto op = f.string("op");
  auto feature = f.string("feature");
  if (op == "set_attribute") return SetAttribute{feature, f.string("attr"), f.value("value")};
  if (f.has("attr") || f.has("value")) throw FormatError(f.at("op"), op + " takes no attr or value");
  if (op == "select") return Select{feature};
  if (op == "deselect") return Deselect{feature};
  throw FormatError(f.at("op"), "unknown action `" + op + "`");
}

Configuration apply_actions(Configuration cfg, const std::vector<Action>& actions) {
  for (const auto& action : actions) {
    if (const auto* s = std::get_if<Select>(&action)) {
      cfg.selected.insert(s->feature);
    } else if (const auto* d = std::get_if<Deselect>(&action)) {
      cfg.selected.erase(d->feature);
      auto it = cfg.bindings.lower_bound({d->feature, ""});
      while (it != cfg.bindings.end() && it->first.first == d->feature) it = cfg.bindings.erase(it);
    } else {
      const auto& set = std::get<SetAttribute>(action);
      cfg.bindings[{set.feature, set.attr}] = set.value;
    }
  }
  return cfg;
}

std::vector<Action> diff_actions(const Configuration& from, const Configuration& to) {
  std::vector<Action> out;
  for (const auto& id : from.selected) {
    if (!to.is_selected(id)) out.push_back(Deselect{id});
  }
  for (const auto& id : to.selected) {
    if (!from.is_selected(id)) out.push_back(Select{id});
  }
  for (const auto& [key, value] : to.bindings) {
    auto it = from.bindings.find(key);
    if (it == from.bindings.end() || it->second != value || !from.is_selected(key.first)) {
      out.push_back(SetAttribute{key.first, key.second, value});
    }
  }
  return out;
}

}  // namespace dspl
