#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/configuration.hpp"
#include "dspl/feature_model.hpp"
#include "dspl/goal_model.hpp"

namespace dspl {

struct AttrConstraint {
  std::string attr;
  Comparator op = Comparator::Eq;
  Value literal;

  bool operator==(const AttrConstraint&) const = default;
};

/// A feature demanded by name, optionally pinned to one provider and
/// optionally constrained on one attribute.
struct FeatureRequirement {
  std::string feature_name;
  /// Empty means any provider.
  std::optional<std::string> provider;
  std::optional<AttrConstraint> attr_constraint;

  /// Provider-scoped requirements only bind models of that provider.
  bool applies_to(const FeatureModel& fm) const { return !provider || *provider == fm.provider_id(); }
  std::string str() const;

  bool operator==(const FeatureRequirement&) const = default;
};

struct RequirementSet {
  std::vector<FeatureRequirement> required;
  /// Drives the customer-satisfaction term of the objective.
  std::vector<FeatureRequirement> preferred;

  bool operator==(const RequirementSet&) const = default;
};

/// True iff the named feature is selected and its binding meets the
/// attribute constraint. Applicability is not checked here.
bool satisfies(const FeatureModel& fm, const Configuration& cfg, const FeatureRequirement& req);

/// Some value of the attribute's domain meets the constraint (vacuously
/// true without one). False when the feature or attribute is unknown.
bool domain_satisfiable(const FeatureModel& fm, const FeatureRequirement& req);

enum class Preference { Required, Preferred };

struct MappingRule {
  std::string rule_id;
  std::string goal;
  std::vector<FeatureRequirement> targets;
  Preference preference = Preference::Required;
};

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  std::string rule_id;
  std::string message;
};

std::string_view to_string(Diagnostic::Severity s);

/// Throws FormatError on malformed documents, empty target lists or
/// duplicate rule ids.
std::vector<MappingRule> parse_mapping(std::string_view text);
std::vector<MappingRule> mapping_from_json(const nlohmann::json& doc);

RequirementSet parse_requirements(std::string_view text);
RequirementSet requirements_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RequirementSet& req);
nlohmann::json to_json(const FeatureRequirement& req);
FeatureRequirement feature_requirement_from_json(const nlohmann::json& j, const std::string& where);

/// Unknown goals and unknown attributes on known features are errors; a
/// feature offered by no catalog model is only a warning.
std::vector<Diagnostic> check_wellformed(const std::vector<MappingRule>& rules, const GoalModel& gm,
                                         const std::vector<FeatureModel>& catalog);

/// Targets of every rule whose goal is active, in (rule_id, target index)
/// order, split by preference and deduplicated.
RequirementSet derive_requirements(const std::set<std::string>& active, const std::vector<MappingRule>& rules);

}  // namespace dspl
