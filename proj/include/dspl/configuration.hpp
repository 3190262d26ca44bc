#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspl/feature_model.hpp"

namespace dspl {

using BindingKey = std::pair<std::string, std::string>;  // (feature id, attribute name)

/// A feature selection plus attribute bindings over one model. Semantic
/// validity is a separate question answered by validate_configuration.
struct Configuration {
  std::string model_id;
  std::set<std::string> selected;
  std::map<BindingKey, Value> bindings;

  bool is_selected(const std::string& id) const { return selected.count(id) != 0; }
  bool operator==(const Configuration&) const = default;
};

Configuration configuration_from_json(const nlohmann::json& doc);
Configuration parse_configuration(std::string_view text);
nlohmann::json to_json(const Configuration& cfg);
/// Canonical serialization; the digest input.
std::string canonical_text(const Configuration& cfg);
std::string config_digest(const Configuration& cfg);

/// Throws ConfigurationError when ids, attributes or bound values do not
/// exist in the model, or a binding sits on an unselected feature.
void check_structure(const FeatureModel& fm, const Configuration& cfg);

/// Selected feature names, sorted. First component of the canonical order.
std::vector<std::string> selected_names(const FeatureModel& fm, const Configuration& cfg);
/// Bindings keyed by (feature name, attribute), sorted. Second component.
std::vector<std::pair<BindingKey, Value>> binding_vector(const FeatureModel& fm, const Configuration& cfg);
/// Canonical strict weak order used by enumeration and tie-breaking.
bool canonical_less(const FeatureModel& fm, const Configuration& a, const Configuration& b);

enum class Rule {
  RootMissing,
  MandatoryMissing,
  ParentMissing,
  GroupCardinality,
  Requires,
  Excludes,
  AttrPredicate,
  AttrUnbound,
};

std::string_view to_string(Rule rule);

struct Violation {
  Rule rule;
  std::vector<std::string> offenders;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Violations ordered by rule, then offender ids.
struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
};

nlohmann::json to_json(const ValidationReport& report);

/// Throws ConfigurationError on a model id mismatch or a structurally
/// broken configuration (see check_structure).
ValidationReport validate_configuration(const FeatureModel& fm, const Configuration& cfg);

/// Throws UnboundAttributeError when an attribute predicate targets a
/// selected feature whose attribute is unbound.
bool evaluate_constraint(const FeatureModel& fm, const Configuration& cfg, const CrossTreeConstraint& c);

struct Enumeration {
  std::vector<Configuration> configurations;
  bool truncated = false;
};

/// Every valid full configuration, attribute bindings included, in
/// canonical order, cut at `limit`.
Enumeration enumerate_configurations(const FeatureModel& fm, std::size_t limit);

enum class Decision { Selected, Deselected };

std::string_view to_string(Decision d);

using Decisions = std::map<std::string, Decision>;

struct Contradiction {
  /// A smallest subset of the input decisions that is already contradictory.
  Decisions conflicting;
  /// Where propagation broke, e.g. "group at OS"; "no valid completion"
  /// when only exhaustive search exposes the conflict.
  std::string site;
  std::string message;
};

/// Closure of the input decisions under the tree, group and cross-tree
/// rules. Reports a Contradiction exactly when no valid full configuration
/// extends the input. Throws LookupError for unknown ids.
std::variant<Decisions, Contradiction> propagate_decisions(const FeatureModel& fm, const Decisions& decisions);

}  // namespace dspl
