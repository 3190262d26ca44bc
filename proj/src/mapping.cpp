#include "dspl/mapping.hpp"

#include <algorithm>

#include "dspl/error.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

std::string FeatureRequirement::str() const {
  std::string out = feature_name;
  if (attr_constraint) {
    out += "." + attr_constraint->attr + " " + std::string(to_string(attr_constraint->op)) + " " +
           literal_text(attr_constraint->literal);
  }
  if (provider) out += " @" + *provider;
  return out;
}

bool satisfies(const FeatureModel& fm, const Configuration& cfg, const FeatureRequirement& req) {
  const Feature* f = fm.find_by_name(req.feature_name);
  if (f == nullptr || !cfg.is_selected(f->id)) return false;
  if (!req.attr_constraint) return true;
  auto it = cfg.bindings.find({f->id, req.attr_constraint->attr});
  return it != cfg.bindings.end() && compare(it->second, req.attr_constraint->op, req.attr_constraint->literal);
}

bool domain_satisfiable(const FeatureModel& fm, const FeatureRequirement& req) {
  const Feature* f = fm.find_by_name(req.feature_name);
  if (f == nullptr) return false;
  if (!req.attr_constraint) return true;
  auto it = f->attributes.find(req.attr_constraint->attr);
  if (it == f->attributes.end()) return false;
  for (const auto& v : it->second.domain.values()) {
    if (compare(v, req.attr_constraint->op, req.attr_constraint->literal)) return true;
  }
  return false;
}

std::string_view to_string(Diagnostic::Severity s) { return s == Diagnostic::Severity::Error ? "error" : "warning"; }

FeatureRequirement feature_requirement_from_json(const json& j, const std::string& where) {
  Fields f(j, where, {"feature_name", "scope", "attr_constraint"});
  FeatureRequirement req;
  req.feature_name = f.string("feature_name");
  if (const json* scope = f.optional("scope")) {
    if (scope->is_string()) {
      if (scope->get<std::string>() != "any") throw FormatError(f.at("scope"), "scope is \"any\" or {\"provider\": id}");
    } else {
      Fields sf(*scope, f.at("scope"), {"provider"});
      req.provider = sf.string("provider");
    }
  }
  if (const json* c = f.optional("attr_constraint")) {
    Fields cf(*c, f.at("attr_constraint"), {"attr", "op", "literal"});
    auto op = parse_comparator(cf.string("op"));
    if (!op) throw FormatError(cf.at("op"), "unknown comparator");
    AttrConstraint ac{cf.string("attr"), *op, cf.value("literal")};
    if (is_ordering(ac.op) && !std::holds_alternative<std::int64_t>(ac.literal)) {
      throw FormatError(cf.at("literal"), "ordering comparator needs an integer literal");
    }
    req.attr_constraint = std::move(ac);
  }
  return req;
}

json to_json(const FeatureRequirement& req) {
  json out{{"feature_name", req.feature_name}};
  out["scope"] = req.provider ? json{{"provider", *req.provider}} : json("any");
  if (req.attr_constraint) {
    out["attr_constraint"] = json{{"attr", req.attr_constraint->attr},
                                  {"op", std::string(to_string(req.attr_constraint->op))},
                                  {"literal", to_json(req.attr_constraint->literal)}};
  } else {
    out["attr_constraint"] = nullptr;
  }
  return out;
}

json to_json(const RequirementSet& req) {
  json required = json::array();
  json preferred = json::array();
  for (const auto& r : req.required) required.push_back(to_json(r));
  for (const auto& r : req.preferred) preferred.push_back(to_json(r));
  return json{{"required", required}, {"preferred", preferred}};
}

RequirementSet requirements_from_json(const json& doc) {
  Fields f(doc, "", {"required", "preferred"});
  RequirementSet out;
  for (auto [key, list] : {std::pair{"required", &out.required}, std::pair{"preferred", &out.preferred}}) {
    const json& items = f.array(key);
    for (std::size_t i = 0; i < items.size(); ++i) {
      auto req = feature_requirement_from_json(items[i], detail::item_path(f.at(key), i));
      if (std::find(list->begin(), list->end(), req) == list->end()) list->push_back(std::move(req));
    }
  }
  return out;
}

RequirementSet parse_requirements(std::string_view text) { return requirements_from_json(detail::parse_json(text)); }

std::vector<MappingRule> mapping_from_json(const json& doc) {
  Fields f(doc, "", {"rules"});
  std::vector<MappingRule> rules;
  const json& items = f.array("rules");
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto where = detail::item_path(f.at("rules"), i);
    Fields rf(items[i], where, {"rule_id", "goal", "preference", "targets"});
    MappingRule rule;
    rule.rule_id = rf.string("rule_id");
    rule.goal = rf.string("goal");
    auto pref = rf.optional_string("preference").value_or("required");
    if (pref == "required") {
      rule.preference = Preference::Required;
    } else if (pref == "preferred") {
      rule.preference = Preference::Preferred;
    } else {
      throw FormatError(rf.at("preference"), "unknown preference `" + pref + "`");
    }
    const json& targets = rf.array("targets");
    for (std::size_t t = 0; t < targets.size(); ++t) {
      rule.targets.push_back(feature_requirement_from_json(targets[t], detail::item_path(rf.at("targets"), t)));
    }
    if (rule.targets.empty()) throw FormatError(rf.at("targets"), "rule " + rule.rule_id + " has no targets");
    for (const auto& other : rules) {
      if (other.rule_id == rule.rule_id) throw FormatError(rf.at("rule_id"), "duplicate rule id: " + rule.rule_id);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<MappingRule> parse_mapping(std::string_view text) { return mapping_from_json(detail::parse_json(text)); }

std::vector<Diagnostic> check_wellformed(const std::vector<MappingRule>& rules, const GoalModel& gm,
                                         const std::vector<FeatureModel>& catalog) {
  std::vector<Diagnostic> out;
  for (const auto& rule : rules) {
    if (gm.goals().count(rule.goal) == 0) {
      out.push_back({Diagnostic::Severity::Error, rule.rule_id, "unknown goal: " + rule.goal});
    }
    for (const auto& target : rule.targets) {
      bool offered = false;
      for (const auto& fm : catalog) {
        const Feature* f = fm.find_by_name(target.feature_name);
        if (f == nullptr) continue;
        offered = true;
        if (target.attr_constraint && f->attributes.count(target.attr_constraint->attr) == 0) {
          out.push_back({Diagnostic::Severity::Error, rule.rule_id,
                         "unknown attribute: " + target.feature_name + "." + target.attr_constraint->attr + " in " +
                             fm.model_id()});
        }
      }
      if (!offered) {
        out.push_back({Diagnostic::Severity::Warning, rule.rule_id,
                       "feature not offered by any provider: " + target.feature_name});
      }
    }
  }
  return out;
}

RequirementSet derive_requirements(const std::set<std::string>& active, const std::vector<MappingRule>& rules) {
  std::vector<const MappingRule*> ordered;
  for (const auto& r : rules) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const MappingRule* a, const MappingRule* b) { return a->rule_id < b->rule_id; });
  RequirementSet out;
  for (const MappingRule* rule : ordered) {
    if (active.count(rule->goal) == 0) continue;
    auto& list = rule->preference == Preference::Required ? out.required : out.preferred;
    for (const auto& target : rule->targets) {
      if (std::find(list.begin(), list.end(), target) == list.end()) list.push_back(target);
    }
  }
  return out;
}

}  // namespace dspl
