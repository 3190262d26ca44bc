#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspl/value.hpp"

namespace dspl {

enum class Layer { IaaS, PaaS, SaaS };
enum class Variation { Mandatory, Optional };

std::string_view to_string(Layer layer);
std::string_view to_string(Variation variation);

/// Group cardinality <min..max> over a subset of the owner's children.
/// XOR is <1..1>, OR is <1..n>.
struct Group {
  std::size_t min = 0;
  std::size_t max = 0;
  std::vector<std::string> members;

  bool operator==(const Group&) const = default;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool operator==(const IntRange&) const = default;
};

/// Finite attribute domain: an explicit literal set or an inclusive integer
/// range. Domains are materialized during search, so their size is capped.
class AttributeDomain {
 public:
  static constexpr std::size_t kMaxSize = 4096;

  static AttributeDomain literals(std::vector<Value> values);
  static AttributeDomain range(std::int64_t lo, std::int64_t hi);

  bool is_range() const { return std::holds_alternative<IntRange>(repr_); }
  const std::variant<std::vector<Value>, IntRange>& repr() const { return repr_; }

  bool contains(const Value& value) const;
  std::size_t size() const;
  /// All members in ascending Value order.
  std::vector<Value> values() const;

  bool operator==(const AttributeDomain&) const = default;

 private:
  explicit AttributeDomain(std::variant<std::vector<Value>, IntRange> repr) : repr_(std::move(repr)) {}

  std::variant<std::vector<Value>, IntRange> repr_;
};

struct AttributeSpec {
  std::string name;
  AttributeDomain domain = AttributeDomain::literals({Value(std::int64_t{0})});
  Value default_value;

  bool operator==(const AttributeSpec&) const = default;
};

/// `key=value` line of the rendered configuration file. Both sides may use
/// `${attr}` placeholders naming attributes of the owning feature.
struct ConfigEntryTemplate {
  std::string key;
  std::string value;

  bool operator==(const ConfigEntryTemplate&) const = default;
};

/// Script row. Fails at execution time when `precondition` names a key the
/// environment does not hold yet.
struct CommandTemplate {
  std::string verb;
  std::vector<std::string> args;
  std::optional<std::string> precondition;

  bool operator==(const CommandTemplate&) const = default;
};

using ArtifactTemplate = std::variant<ConfigEntryTemplate, CommandTemplate>;

struct Feature {
  std::string id;
  std::string name;
  std::optional<std::string> parent;
  Variation variation = Variation::Optional;
  std::optional<Group> group;
  std::map<std::string, AttributeSpec> attributes;
  /// Runtime-rebindable variation point; only these may be touched by
  /// adaptation rules.
  bool dynamic = false;
  std::vector<ArtifactTemplate> artifact_templates;

  bool operator==(const Feature&) const = default;
};

struct Requires {
  std::string feature;
  std::string required;

  bool operator==(const Requires&) const = default;
};

struct Excludes {
  std::string feature;
  std::string excluded;

  bool operator==(const Excludes&) const = default;
};

struct AttrPredicate {
  std::string feature;
  std::string attr;
  Comparator op = Comparator::Eq;
  Value literal;

  bool operator==(const AttrPredicate&) const = default;
};

using CrossTreeConstraint = std::variant<Requires, Excludes, AttrPredicate>;

std::string describe(const CrossTreeConstraint& constraint);

/// Extended feature model of one provider offer. Immutable once built: the
/// constructor checks every structural invariant and throws ModelError
/// naming the offending id.
class FeatureModel {
 public:
  FeatureModel(std::string model_id, std::string provider_id, Layer layer, std::vector<Feature> features,
               std::vector<CrossTreeConstraint> constraints);

  const std::string& model_id() const { return model_id_; }
  const std::string& provider_id() const { return provider_id_; }
  Layer layer() const { return layer_; }
  const std::string& root() const { return root_; }
  const std::map<std::string, Feature>& features() const { return features_; }
  const std::vector<CrossTreeConstraint>& constraints() const { return constraints_; }

  /// Throws LookupError for unknown ids.
  const Feature& feature(std::string_view id) const;
  const Feature* find(std::string_view id) const;
  const Feature* find_by_name(std::string_view name) const;

  /// Child ids ordered by feature name.
  const std::vector<std::string>& children(std::string_view id) const;
  /// Every feature id ordered by feature name.
  const std::vector<std::string>& ids_by_name() const { return ids_by_name_; }

  bool operator==(const FeatureModel& other) const;

 private:
  void check_tree();
  void check_feature(const Feature& f) const;
  void check_constraint(const CrossTreeConstraint& c) const;

  std::string model_id_;
  std::string provider_id_;
  Layer layer_;
  std::string root_;
  std::map<std::string, Feature> features_;
  std::vector<CrossTreeConstraint> constraints_;
  std::map<std::string, std::string, std::less<>> by_name_;
  std::map<std::string, std::vector<std::string>, std::less<>> children_;
  std::vector<std::string> ids_by_name_;
};

FeatureModel parse_feature_model(std::string_view text);
FeatureModel feature_model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const FeatureModel& model);
/// Canonical text form; parse_feature_model(serialize(m)) == m.
std::string serialize(const FeatureModel& model);
/// SHA-256 of the canonical text form.
std::string model_digest(const FeatureModel& model);

}  // namespace dspl
