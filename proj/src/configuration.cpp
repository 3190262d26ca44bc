#include "dspl/configuration.hpp"

#include <algorithm>
#include <tuple>

#include "dspl/digest.hpp"
#include "dspl/error.hpp"
#include "json_util.hpp"
#include "solver.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

Configuration configuration_from_json(const json& doc) {
  Fields f(doc, "", {"model_id", "selected", "bindings"});
  Configuration cfg;
  cfg.model_id = f.string("model_id");
  for (auto& id : f.strings("selected")) cfg.selected.insert(std::move(id));
  if (const json* b = f.optional("bindings")) {
    if (!b->is_object()) throw FormatError(f.at("bindings"), "expected an object of feature -> {attr: value}");
    for (const auto& [feature, attrs] : b->items()) {
      auto where = f.at("bindings") + "/" + feature;
      if (!attrs.is_object()) throw FormatError(where, "expected an object of attr -> value");
      for (const auto& [attr, value] : attrs.items()) {
        cfg.bindings.emplace(BindingKey{feature, attr}, value_from_json(value, where + "/" + attr));
      }
    }
  }
  return cfg;
}

Configuration parse_configuration(std::string_view text) { return configuration_from_json(detail::parse_json(text)); }

json to_json(const Configuration& cfg) {
  json bindings = json::object();
  for (const auto& [key, value] : cfg.bindings) bindings[key.first][key.second] = to_json(value);
  return json{{"model_id", cfg.model_id}, {"selected", cfg.selected}, {"bindings", bindings}};
}

std::string canonical_text(const Configuration& cfg) { return to_json(cfg).dump(); }

std::string config_digest(const Configuration& cfg) { return sha256_hex(canonical_text(cfg)); }

void check_structure(const FeatureModel& fm, const Configuration& cfg) {
  for (const auto& id : cfg.selected) {
    if (fm.find(id) == nullptr) throw ConfigurationError("unknown feature id: " + id);
  }
  for (const auto& [key, value] : cfg.bindings) {
    const Feature* f = fm.find(key.first);
    if (f == nullptr) throw ConfigurationError("unknown feature id: " + key.first);
    auto it = f->attributes.find(key.second);
    if (it == f->attributes.end()) throw ConfigurationError("unknown attribute: " + key.first + "." + key.second);
    if (!cfg.is_selected(key.first)) {
      throw ConfigurationError("binding on unselected feature: " + key.first + "." + key.second);
    }
    if (!it->second.domain.contains(value)) {
      throw ConfigurationError("value " + to_string(value) + " outside domain of " + key.first + "." + key.second);
    }
  }
}

std::vector<std::string> selected_names(const FeatureModel& fm, const Configuration& cfg) {
  std::vector<std::string> names;
  for (const auto& id : cfg.selected) names.push_back(fm.feature(id).name);
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::pair<BindingKey, Value>> binding_vector(const FeatureModel& fm, const Configuration& cfg) {
  std::vector<std::pair<BindingKey, Value>> out;
  for (const auto& [key, value] : cfg.bindings) out.emplace_back(BindingKey{fm.feature(key.first).name, key.second}, value);
  std::sort(out.begin(), out.end());
  return out;
}

bool canonical_less(const FeatureModel& fm, const Configuration& a, const Configuration& b) {
  auto na = selected_names(fm, a);
  auto nb = selected_names(fm, b);
  if (na != nb) return na < nb;
  return binding_vector(fm, a) < binding_vector(fm, b);
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::RootMissing: return "root_missing";
    case Rule::MandatoryMissing: return "mandatory_missing";
    case Rule::ParentMissing: return "parent_missing";
    case Rule::GroupCardinality: return "group_cardinality";
    case Rule::Requires: return "requires";
    case Rule::Excludes: return "excludes";
    case Rule::AttrPredicate: return "attr_predicate";
    case Rule::AttrUnbound: return "attr_unbound";
  }
  return "?";
}

json to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back(json{{"rule", std::string(to_string(v.rule))}, {"offenders", v.offenders}, {"message", v.message}});
  }
  return json{{"valid", report.valid()}, {"violations", violations}};
}

ValidationReport validate_configuration(const FeatureModel& fm, const Configuration& cfg) {
  if (cfg.model_id != fm.model_id()) {
    throw ConfigurationError("model id mismatch: configuration targets `" + cfg.model_id + "`, model is `" +
                             fm.model_id() + "`");
  }
  check_structure(fm, cfg);

  ValidationReport report;
  auto add = [&](Rule rule, std::vector<std::string> offenders, std::string message) {
    report.violations.push_back(Violation{rule, std::move(offenders), std::move(message)});
  };

  if (!cfg.is_selected(fm.root())) add(Rule::RootMissing, {fm.root()}, "root " + fm.root() + " is not selected");
  for (const auto& id : cfg.selected) {
    const Feature& f = fm.feature(id);
    for (const auto& child : fm.children(id)) {
      if (fm.feature(child).variation == Variation::Mandatory && !cfg.is_selected(child)) {
        add(Rule::MandatoryMissing, {child}, "mandatory feature " + child + " missing under " + id);
      }
    }
    if (f.parent && !cfg.is_selected(*f.parent)) {
      add(Rule::ParentMissing, {id}, "parent " + *f.parent + " of " + id + " is not selected");
    }
    if (f.group) {
      auto count = static_cast<std::size_t>(std::count_if(f.group->members.begin(), f.group->members.end(),
                                                          [&](const std::string& m) { return cfg.is_selected(m); }));
      if (count < f.group->min || count > f.group->max) {
        add(Rule::GroupCardinality, {id},
            "group at " + id + " has " + std::to_string(count) + " selected members, expected <" +
                std::to_string(f.group->min) + ".." + std::to_string(f.group->max) + ">");
      }
    }
    for (const auto& [attr, spec] : f.attributes) {
      if (cfg.bindings.count({id, attr}) == 0) add(Rule::AttrUnbound, {id}, "attribute " + id + "." + attr + " is unbound");
    }
  }
  for (const auto& c : fm.constraints()) {
    if (const auto* r = std::get_if<Requires>(&c)) {
      if (cfg.is_selected(r->feature) && !cfg.is_selected(r->required)) {
        add(Rule::Requires, {r->feature, r->required}, describe(c) + " violated");
      }
    } else if (const auto* x = std::get_if<Excludes>(&c)) {
      if (cfg.is_selected(x->feature) && cfg.is_selected(x->excluded)) {
        add(Rule::Excludes, {x->feature, x->excluded}, describe(c) + " violated");
      }
    } else {
      const auto& p = std::get<AttrPredicate>(c);
      auto it = cfg.bindings.find({p.feature, p.attr});
      if (cfg.is_selected(p.feature) && it != cfg.bindings.end() && !compare(it->second, p.op, p.literal)) {
        add(Rule::AttrPredicate, {p.feature}, describe(c) + " violated by " + to_string(it->second));
      }
    }
  }
  std::sort(report.violations.begin(), report.violations.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.rule, a.offenders, a.message) < std::tie(b.rule, b.offenders, b.message);
  });
  return report;
}

bool evaluate_constraint(const FeatureModel& fm, const Configuration& cfg, const CrossTreeConstraint& c) {
  (void)fm;
  if (const auto* r = std::get_if<Requires>(&c)) return !cfg.is_selected(r->feature) || cfg.is_selected(r->required);
  if (const auto* x = std::get_if<Excludes>(&c)) return !(cfg.is_selected(x->feature) && cfg.is_selected(x->excluded));
  const auto& p = std::get<AttrPredicate>(c);
  if (!cfg.is_selected(p.feature)) return true;
  auto it = cfg.bindings.find({p.feature, p.attr});
  if (it == cfg.bindings.end()) throw UnboundAttributeError("attribute " + p.feature + "." + p.attr + " is unbound");
  return compare(it->second, p.op, p.literal);
}

std::string_view to_string(Decision d) { return d == Decision::Selected ? "selected" : "deselected"; }

namespace {

using detail::Assignment;
using detail::Index;
using detail::kUndecided;

using Item = std::pair<int, signed char>;

Assignment seed(const Index& ix, const std::vector<Item>& items) {
  Assignment a(ix.ids.size(), kUndecided);
  for (auto [f, v] : items) a[f] = v;
  return a;
}

bool contradictory(const Index& ix, const std::vector<Item>& items) {
  Assignment a = seed(ix, items);
  if (detail::propagate(ix, a)) return true;
  return detail::search(ix, a, [](const Assignment&) { return false; });
}

std::vector<Item> minimal_conflict(const Index& ix, const std::vector<Item>& items) {
  if (contradictory(ix, {})) return {};
  for (const auto& d : items) {
    if (contradictory(ix, {d})) return {d};
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (contradictory(ix, {items[i], items[j]})) return {items[i], items[j]};
    }
  }
  std::vector<Item> core = items;
  for (std::size_t i = 0; i < core.size();) {
    std::vector<Item> without = core;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (contradictory(ix, without)) {
      core = std::move(without);
    } else {
      ++i;
    }
  }
  return core;
}

}  // namespace

std::variant<Decisions, Contradiction> propagate_decisions(const FeatureModel& fm, const Decisions& decisions) {
  Index ix(fm);
  std::vector<Item> items;
  for (const auto& [id, d] : decisions) {
    auto it = ix.pos.find(id);
    if (it == ix.pos.end()) throw LookupError("unknown feature id: " + id);
    items.emplace_back(it->second, d == Decision::Selected ? 1 : 0);
  }

  if (!contradictory(ix, items)) {
    Assignment a = seed(ix, items);
    detail::propagate(ix, a);
    Decisions out;
    for (std::size_t f = 0; f < a.size(); ++f) {
      if (a[f] != kUndecided) out.emplace(ix.ids[f], a[f] == 1 ? Decision::Selected : Decision::Deselected);
    }
    return out;
  }

  auto core = minimal_conflict(ix, items);
  Contradiction c;
  for (auto [f, v] : core) c.conflicting.emplace(ix.ids[f], v == 1 ? Decision::Selected : Decision::Deselected);
  Assignment a = seed(ix, core);
  if (auto conflict = detail::propagate(ix, a)) {
    c.site = conflict->site;
    c.message = "feature " + ix.ids[conflict->feature] + " forced both ways at " + conflict->site;
  } else {
    c.site = "no valid completion";
    c.message = "no valid configuration extends the decisions";
  }
  return c;
}

Enumeration enumerate_configurations(const FeatureModel& fm, std::size_t limit) {
  Index ix(fm);
  std::vector<Assignment> selections;
  detail::search(ix, Assignment(ix.ids.size(), kUndecided), [&](const Assignment& a) {
    selections.push_back(a);
    return true;
  });

  // Index positions follow name order, so comparing selected positions
  // compares the sorted name vectors.
  auto positions = [](const Assignment& a) {
    std::vector<int> p;
    for (std::size_t f = 0; f < a.size(); ++f) {
      if (a[f] == 1) p.push_back(static_cast<int>(f));
    }
    return p;
  };
  std::vector<std::pair<std::vector<int>, std::size_t>> keyed;
  for (std::size_t i = 0; i < selections.size(); ++i) keyed.emplace_back(positions(selections[i]), i);
  std::sort(keyed.begin(), keyed.end());

  Enumeration out;
  for (const auto& [key, idx] : keyed) {
    const Assignment& a = selections[idx];
    auto slots = detail::selected_slots(ix, a);
    std::vector<std::size_t> choice(slots.size(), 0);
    while (true) {
      if (out.configurations.size() == limit) {
        out.truncated = true;
        return out;
      }
      out.configurations.push_back(detail::make_configuration(ix, a, choice));
      // Odometer with the last slot varying fastest gives lexicographic
      // binding order; slots are already sorted by (feature name, attr).
      std::size_t k = slots.size();
      while (k > 0) {
        --k;
        if (++choice[k] < slots[k]->allowed.size()) break;
        choice[k] = 0;
        if (k == 0) {
          k = slots.size() + 1;
          break;
        }
      }
      if (k == slots.size() + 1 || slots.empty()) break;
    }
  }
  return out;
}

}  // namespace dspl
