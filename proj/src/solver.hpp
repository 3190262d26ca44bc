#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dspl/configuration.hpp"
#include "dspl/feature_model.hpp"

namespace dspl::detail {

/// Dense, name-ordered view of a feature model used by propagation and
/// search. Position i is the i-th feature by name.
struct Index {
  struct GroupIx {
    int owner = -1;
    int min = 0;
    int max = 0;
    std::vector<int> members;
  };

  /// Attribute of one feature with the values that survive the model's
  /// attribute predicates (and any extra restrictions).
  struct Slot {
    std::string attr;
    std::vector<Value> allowed;
  };

  explicit Index(const FeatureModel& fm);

  /// Drops allowed values of (feature, attr) failing `op literal`. Returns
  /// false when the attribute does not exist on the feature.
  bool restrict_slot(int feature, const std::string& attr, Comparator op, const Value& literal);

  const FeatureModel* model = nullptr;
  std::vector<std::string> ids;
  std::map<std::string, int, std::less<>> pos;
  int root = -1;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;
  std::vector<char> mandatory;
  std::vector<GroupIx> groups;
  std::vector<int> member_group;
  std::vector<std::pair<int, int>> requires_edges;
  std::vector<std::pair<int, int>> excludes_edges;
  std::vector<std::vector<Slot>> slots;
  /// Features with an attribute whose allowed set is empty.
  std::vector<char> dead;
};

using Assignment = std::vector<signed char>;
inline constexpr signed char kUndecided = -1;

struct Conflict {
  int feature = -1;
  std::string site;
};

/// Local fixpoint propagation. On a fully decided assignment a nullopt
/// result means the selection is structurally valid.
std::optional<Conflict> propagate(const Index& ix, Assignment& a);

/// Depth-first search over complete valid selections, branching on the
/// first undecided feature by name. `visit` returns false to stop; the
/// function returns false iff it was stopped.
bool search(const Index& ix, Assignment start, const std::function<bool(const Assignment&)>& visit);

/// Builds the configuration for a complete assignment with the given
/// per-slot value choices (indices into Slot::allowed, slot order).
Configuration make_configuration(const Index& ix, const Assignment& a, const std::vector<std::size_t>& choice);

/// Binding slots of the selected features, in slot order.
std::vector<const Index::Slot*> selected_slots(const Index& ix, const Assignment& a, std::vector<int>* owners = nullptr);

}  // namespace dspl::detail
