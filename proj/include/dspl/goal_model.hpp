#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/context.hpp"
#include "dspl/predicate.hpp"

namespace dspl {

enum class Decomposition { And, Or, Leaf };

std::string_view to_string(Decomposition d);

/// An achieve-goal as declared in an agent definition: decomposition,
/// parameters, creation/drop conditions and the goals it inhibits.
struct Goal {
  std::string id;
  std::string name;
  Decomposition decomposition = Decomposition::Leaf;
  std::vector<std::string> children;
  std::map<std::string, Value> parameters;
  std::optional<ContextPredicate> creation_condition;
  std::optional<ContextPredicate> drop_condition;
  std::vector<std::string> inhibits;

  bool operator==(const Goal&) const = default;
};

/// AND/OR goal tree. The constructor throws ModelError on cycles, unknown
/// children or inhibits targets, and on self or ancestor inhibition.
class GoalModel {
 public:
  GoalModel(std::string model_id, std::string root, std::vector<Goal> goals);

  const std::string& model_id() const { return model_id_; }
  const std::string& root() const { return root_; }
  const std::map<std::string, Goal>& goals() const { return goals_; }
  /// Throws LookupError.
  const Goal& goal(std::string_view id) const;
  bool is_leaf(std::string_view id) const { return goal(id).decomposition == Decomposition::Leaf; }

  bool operator==(const GoalModel&) const = default;

 private:
  std::string model_id_;
  std::string root_;
  std::map<std::string, Goal> goals_;
};

GoalModel parse_goal_model(std::string_view text);
GoalModel goal_model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const GoalModel& gm);

/// Goals whose creation condition holds and drop condition does not, minus
/// those inhibited by another eligible goal. Sorted by id.
std::vector<std::string> active_goals(const GoalModel& gm, const ContextSnapshot& ctx);

/// AND needs every child, OR at least one, a leaf must be achieved.
bool goal_satisfied(const GoalModel& gm, const std::set<std::string>& achieved_leaves, std::string_view goal);

}  // namespace dspl
