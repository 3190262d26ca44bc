#include "dspl/feature_model.hpp"

#include <algorithm>
#include <set>

#include "dspl/error.hpp"
#include "placeholder.hpp"

namespace dspl {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::IaaS: return "IaaS";
    case Layer::PaaS: return "PaaS";
    case Layer::SaaS: return "SaaS";
  }
  return "?";
}

std::string_view to_string(Variation variation) {
  return variation == Variation::Mandatory ? "mandatory" : "optional";
}

AttributeDomain AttributeDomain::literals(std::vector<Value> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return AttributeDomain(std::move(values));
}

AttributeDomain AttributeDomain::range(std::int64_t lo, std::int64_t hi) { return AttributeDomain(IntRange{lo, hi}); }

bool AttributeDomain::contains(const Value& value) const {
  if (const auto* r = std::get_if<IntRange>(&repr_)) {
    const auto* i = std::get_if<std::int64_t>(&value);
    return i != nullptr && r->lo <= *i && *i <= r->hi;
  }
  const auto& values = std::get<std::vector<Value>>(repr_);
  return std::binary_search(values.begin(), values.end(), value);
}

std::size_t AttributeDomain::size() const {
  if (const auto* r = std::get_if<IntRange>(&repr_)) {
    if (r->hi < r->lo) return 0;
    auto width = static_cast<unsigned long long>(r->hi) - static_cast<unsigned long long>(r->lo);
    return width >= kMaxSize ? kMaxSize + 1 : static_cast<std::size_t>(width) + 1;
  }
  return std::get<std::vector<Value>>(repr_).size();
}

std::vector<Value> AttributeDomain::values() const {
  if (const auto* r = std::get_if<IntRange>(&repr_)) {
    std::vector<Value> out;
    out.reserve(size());
    for (std::int64_t v = r->lo; v <= r->hi; ++v) {
      out.emplace_back(v);
      if (v == r->hi) break;
    }
    return out;
  }
  return std::get<std::vector<Value>>(repr_);
}

std::string describe(const CrossTreeConstraint& constraint) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Requires>) {
          return "requires(" + c.feature + ", " + c.required + ")";
        } else if constexpr (std::is_same_v<T, Excludes>) {
          return "excludes(" + c.feature + ", " + c.excluded + ")";
        } else {
          return "attr_predicate(" + c.feature + "." + c.attr + " " + std::string(to_string(c.op)) + " " +
                 to_string(c.literal) + ")";
        }
      },
      constraint);
}

FeatureModel::FeatureModel(std::string model_id, std::string provider_id, Layer layer, std::vector<Feature> features,
                           std::vector<CrossTreeConstraint> constraints)
    : model_id_(std::move(model_id)),
      provider_id_(std::move(provider_id)),
      layer_(layer),
      constraints_(std::move(constraints)) {
  if (model_id_.empty()) throw ModelError("", "empty model id");
  if (features.empty()) throw ModelError(model_id_, "model has no features");
  for (auto& f : features) {
    if (f.id.empty()) throw ModelError("", "empty feature id");
    if (f.name.empty()) throw ModelError(f.id, "empty feature name: " + f.id);
    if (features_.count(f.id) != 0) throw ModelError(f.id, "duplicate feature id: " + f.id);
    if (by_name_.count(f.name) != 0) throw ModelError(f.name, "duplicate feature name: " + f.name);
    by_name_.emplace(f.name, f.id);
    std::string id = f.id;
    features_.emplace(std::move(id), std::move(f));
  }
  check_tree();
  for (const auto& [id, f] : features_) check_feature(f);
  for (const auto& c : constraints_) check_constraint(c);
}

void FeatureModel::check_tree() {
  std::vector<std::string> roots;
  for (const auto& [id, f] : features_) {
    children_[id];
    if (!f.parent) {
      roots.push_back(id);
    } else if (features_.count(*f.parent) == 0) {
      throw ModelError(*f.parent, "dangling parent: " + *f.parent);
    }
  }
  if (roots.empty()) throw ModelError(model_id_, "missing root");
  if (roots.size() > 1) throw ModelError(roots[1], "multiple roots: " + roots[0] + ", " + roots[1]);
  root_ = roots.front();

  for (const auto& [id, f] : features_) {
    std::set<std::string> seen{id};
    const Feature* cur = &f;
    while (cur->parent) {
      if (!seen.insert(*cur->parent).second) throw ModelError(id, "parent cycle at " + id);
      cur = &features_.at(*cur->parent);
    }
    if (f.parent) children_[*f.parent].push_back(id);
  }

  auto by_name = [this](const std::string& a, const std::string& b) {
    return features_.at(a).name < features_.at(b).name;
  };
  for (auto& [id, kids] : children_) std::sort(kids.begin(), kids.end(), by_name);
  for (const auto& [id, f] : features_) ids_by_name_.push_back(id);
  std::sort(ids_by_name_.begin(), ids_by_name_.end(), by_name);
}

void FeatureModel::check_feature(const Feature& f) const {
  if (f.group) {
    const auto& kids = children_.at(f.id);
    std::set<std::string> seen;
    for (const auto& m : f.group->members) {
      if (std::find(kids.begin(), kids.end(), m) == kids.end()) {
        throw ModelError(m, "dangling group member: " + m);
      }
      if (!seen.insert(m).second) throw ModelError(m, "duplicate group member: " + m);
    }
    if (f.group->min > f.group->max || f.group->max > f.group->members.size()) {
      throw ModelError(f.id, "invalid cardinality at " + f.id + ": <" + std::to_string(f.group->min) + ".." +
                                 std::to_string(f.group->max) + "> over " +
                                 std::to_string(f.group->members.size()) + " members");
    }
  }
  for (const auto& [name, spec] : f.attributes) {
    std::string where = f.id + "." + name;
    if (name.empty() || name != spec.name) throw ModelError(f.id, "malformed attribute name on " + f.id);
    if (const auto* r = std::get_if<IntRange>(&spec.domain.repr()); r && r->lo > r->hi) {
      throw ModelError(where, "invalid range for " + where);
    }
    if (spec.domain.size() == 0) throw ModelError(where, "empty domain: " + where);
    if (spec.domain.size() > AttributeDomain::kMaxSize) throw ModelError(where, "domain too large: " + where);
    if (!spec.domain.contains(spec.default_value)) throw ModelError(where, "default outside domain: " + where);
  }
  auto check_pattern = [&](const std::string& pattern) {
    std::vector<std::string> names;
    try {
      names = detail::placeholders(pattern);
    } catch (const DerivationError& e) {
      throw ModelError(f.id, std::string(e.what()) + " on " + f.id);
    }
    for (const auto& n : names) {
      if (f.attributes.count(n) == 0) throw ModelError(f.id, "unknown placeholder ${" + n + "} on " + f.id);
    }
  };
  for (const auto& t : f.artifact_templates) {
    if (const auto* entry = std::get_if<ConfigEntryTemplate>(&t)) {
      check_pattern(entry->key);
      check_pattern(entry->value);
    } else {
      const auto& cmd = std::get<CommandTemplate>(t);
      if (cmd.verb.empty()) throw ModelError(f.id, "empty command verb on " + f.id);
      check_pattern(cmd.verb);
      for (const auto& a : cmd.args) check_pattern(a);
    }
  }
}

void FeatureModel::check_constraint(const CrossTreeConstraint& c) const {
  auto need = [this](const std::string& id) {
    if (features_.count(id) == 0) throw ModelError(id, "unknown feature in constraint: " + id);
  };
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Requires>) {
          need(k.feature);
          need(k.required);
        } else if constexpr (std::is_same_v<T, Excludes>) {
          need(k.feature);
          need(k.excluded);
        } else {
          need(k.feature);
          if (features_.at(k.feature).attributes.count(k.attr) == 0) {
            throw ModelError(k.feature + "." + k.attr, "unknown attribute in constraint: " + k.feature + "." + k.attr);
          }
          if (is_ordering(k.op) && !std::holds_alternative<std::int64_t>(k.literal)) {
            throw ModelError(k.feature + "." + k.attr, "ordering comparator needs an integer literal: " + k.feature +
                                                           "." + k.attr);
          }
        }
      },
      c);
}

const Feature& FeatureModel::feature(std::string_view id) const {
  const Feature* f = find(id);
  if (f == nullptr) throw LookupError("unknown feature id: " + std::string(id));
  return *f;
}

const Feature* FeatureModel::find(std::string_view id) const {
  auto it = features_.find(std::string(id));
  return it == features_.end() ? nullptr : &it->second;
}

const Feature* FeatureModel::find_by_name(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &features_.at(it->second);
}

const std::vector<std::string>& FeatureModel::children(std::string_view id) const {
  auto it = children_.find(id);
  if (it == children_.end()) throw LookupError("unknown feature id: " + std::string(id));
  return it->second;
}

bool FeatureModel::operator==(const FeatureModel& other) const {
  return model_id_ == other.model_id_ && provider_id_ == other.provider_id_ && layer_ == other.layer_ &&
         features_ == other.features_ && constraints_ == other.constraints_;
}

}  // namespace dspl
