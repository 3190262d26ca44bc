#include "dspl/goal_model.hpp"

#include <algorithm>
#include <functional>

#include "dspl/error.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

std::string_view to_string(Decomposition d) {
  switch (d) {
    case Decomposition::And: return "AND";
    case Decomposition::Or: return "OR";
    case Decomposition::Leaf: return "leaf";
  }
  return "?";
}

GoalModel::GoalModel(std::string model_id, std::string root, std::vector<Goal> goals)
    : model_id_(std::move(model_id)), root_(std::move(root)) {
  for (auto& g : goals) {
    if (g.id.empty()) throw ModelError("", "empty goal id");
    std::string id = g.id;
    if (goals_.count(id) != 0) throw ModelError(id, "duplicate goal id: " + id);
    goals_.emplace(id, std::move(g));
  }
  if (goals_.count(root_) == 0) throw ModelError(root_, "unknown root goal: " + root_);

  for (const auto& [id, g] : goals_) {
    if ((g.decomposition == Decomposition::Leaf) != g.children.empty()) {
      throw ModelError(id, "goal " + id + ": leaf goals have no children and AND/OR goals need some");
    }
    for (const auto& c : g.children) {
      if (goals_.count(c) == 0) throw ModelError(c, "unknown child goal: " + c);
    }
    for (const auto& t : g.inhibits) {
      if (goals_.count(t) == 0) throw ModelError(t, "unknown inhibits target: " + t);
    }
  }

  // Cycle detection over the decomposition edges, from every goal.
  std::map<std::string, int> color;
  std::function<void(const std::string&)> visit = [&](const std::string& id) {
    color[id] = 1;
    for (const auto& c : goals_.at(id).children) {
      if (color[c] == 1) throw ModelError(c, "decomposition cycle at " + c);
      if (color[c] == 0) visit(c);
    }
    color[id] = 2;
  };
  for (const auto& [id, g] : goals_) {
    if (color[id] == 0) visit(id);
  }

  std::map<std::string, std::string> parent;
  for (const auto& [id, g] : goals_) {
    for (const auto& c : g.children) {
      if (c == root_) throw ModelError(c, "root goal listed as a child: " + c);
      if (!parent.emplace(c, id).second) throw ModelError(c, "goal has multiple parents: " + c);
    }
  }
  for (const auto& [id, g] : goals_) {
    if (id != root_ && parent.count(id) == 0) throw ModelError(id, "goal unreachable from root: " + id);
  }
  for (const auto& [id, g] : goals_) {
    for (const auto& t : g.inhibits) {
      for (std::string cur = id;; cur = parent.at(cur)) {
        if (cur == t) throw ModelError(t, "goal " + id + " inhibits itself or an ancestor: " + t);
        if (cur == root_) break;
      }
    }
  }
}

const Goal& GoalModel::goal(std::string_view id) const {
  auto it = goals_.find(std::string(id));
  if (it == goals_.end()) throw LookupError("unknown goal id: " + std::string(id));
  return it->second;
}

namespace {

std::optional<ContextPredicate> parse_condition(const Fields& f, std::string_view key) {
  auto text = f.optional_string(key);
  if (!text) return std::nullopt;
  try {
    return ContextPredicate::parse(*text);
  } catch (const FormatError& e) {
    throw FormatError(f.at(key), "malformed predicate: " + e.detail());
  }
}

}  // namespace

GoalModel goal_model_from_json(const json& doc) {
  Fields f(doc, "", {"model_id", "root", "goals"});
  std::vector<Goal> goals;
  const json& gs = f.array("goals");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    Fields gf(gs[i], detail::item_path(f.at("goals"), i),
              {"id", "name", "decomposition", "children", "parameters", "creation_condition", "drop_condition",
               "inhibits"});
    Goal g;
    g.id = gf.string("id");
    g.name = gf.optional_string("name").value_or(g.id);
    auto d = gf.optional_string("decomposition").value_or("leaf");
    if (d == "AND") {
      g.decomposition = Decomposition::And;
    } else if (d == "OR") {
      g.decomposition = Decomposition::Or;
    } else if (d == "leaf") {
      g.decomposition = Decomposition::Leaf;
    } else {
      throw FormatError(gf.at("decomposition"), "unknown decomposition `" + d + "`");
    }
    g.children = gf.strings("children");
    if (const json* p = gf.optional("parameters")) {
      if (!p->is_object()) throw FormatError(gf.at("parameters"), "expected an object");
      for (const auto& [name, value] : p->items()) {
        g.parameters.emplace(name, value_from_json(value, gf.at("parameters") + "/" + name));
      }
    }
    g.creation_condition = parse_condition(gf, "creation_condition");
    g.drop_condition = parse_condition(gf, "drop_condition");
    g.inhibits = gf.strings("inhibits");
    goals.push_back(std::move(g));
  }
  return GoalModel(f.string("model_id"), f.string("root"), std::move(goals));
}

GoalModel parse_goal_model(std::string_view text) { return goal_model_from_json(detail::parse_json(text)); }

json to_json(const GoalModel& gm) {
  json goals = json::array();
  for (const auto& [id, g] : gm.goals()) {
    json params = json::object();
    for (const auto& [name, value] : g.parameters) params[name] = to_json(value);
    goals.push_back(json{{"id", g.id},
                         {"name", g.name},
                         {"decomposition", std::string(to_string(g.decomposition))},
                         {"children", g.children},
                         {"parameters", params},
                         {"creation_condition", g.creation_condition ? json(g.creation_condition->str()) : json(nullptr)},
                         {"drop_condition", g.drop_condition ? json(g.drop_condition->str()) : json(nullptr)},
                         {"inhibits", g.inhibits}});
  }
  return json{{"model_id", gm.model_id()}, {"root", gm.root()}, {"goals", goals}};
}

std::vector<std::string> active_goals(const GoalModel& gm, const ContextSnapshot& ctx) {
  std::set<std::string> eligible;
  for (const auto& [id, g] : gm.goals()) {
    bool created = !g.creation_condition || g.creation_condition->holds(ctx.dimensions);
    bool dropped = g.drop_condition && g.drop_condition->holds(ctx.dimensions);
    if (created && !dropped) eligible.insert(id);
  }
  std::set<std::string> inhibited;
  for (const auto& id : eligible) {
    for (const auto& t : gm.goal(id).inhibits) inhibited.insert(t);
  }
  std::vector<std::string> out;
  for (const auto& id : eligible) {
    if (inhibited.count(id) == 0) out.push_back(id);
  }
  return out;
}

bool goal_satisfied(const GoalModel& gm, const std::set<std::string>& achieved_leaves, std::string_view goal) {
  const Goal& g = gm.goal(goal);
  switch (g.decomposition) {
    case Decomposition::Leaf: return achieved_leaves.count(g.id) != 0;
    case Decomposition::And:
      return std::all_of(g.children.begin(), g.children.end(),
                         [&](const std::string& c) { return goal_satisfied(gm, achieved_leaves, c); });
    case Decomposition::Or:
      return std::any_of(g.children.begin(), g.children.end(),
                         [&](const std::string& c) { return goal_satisfied(gm, achieved_leaves, c); });
  }
  return false;
}

}  // namespace dspl
