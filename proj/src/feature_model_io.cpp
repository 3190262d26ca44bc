#include "dspl/digest.hpp"
#include "dspl/error.hpp"
#include "dspl/feature_model.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using detail::item_path;
using nlohmann::json;

namespace {

Layer parse_layer(const std::string& text, const std::string& where) {
  if (text == "IaaS") return Layer::IaaS;
  if (text == "PaaS") return Layer::PaaS;
  if (text == "SaaS") return Layer::SaaS;
  throw FormatError(where, "unknown layer `" + text + "`");
}

AttributeDomain parse_domain(const json& j, const std::string& where) {
  Fields f(j, where, {"enum", "range"});
  if (f.has("enum") == f.has("range")) throw FormatError(where, "domain needs exactly one of `enum` or `range`");
  if (f.has("enum")) {
    const json& values = f.array("enum");
    std::vector<Value> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back(value_from_json(values[i], item_path(f.at("enum"), i)));
    if (out.empty()) throw FormatError(f.at("enum"), "empty domain");
    return AttributeDomain::literals(std::move(out));
  }
  const json& r = f.array("range");
  if (r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
    throw FormatError(f.at("range"), "expected [lo, hi] integers");
  }
  return AttributeDomain::range(r[0].get<std::int64_t>(), r[1].get<std::int64_t>());
}

ArtifactTemplate parse_template(const json& j, const std::string& where) {
  Fields f(j, where, {"kind", "key", "value", "verb", "args", "precondition"});
  auto kind = f.string("kind");
  if (kind == "config") {
    if (f.has("verb") || f.has("args") || f.has("precondition")) {
      throw FormatError(where, "config templates take only `key` and `value`");
    }
    return ConfigEntryTemplate{f.string("key"), f.string("value")};
  }
  if (kind == "command") {
    if (f.has("key") || f.has("value")) throw FormatError(where, "command templates take `verb`, `args`, `precondition`");
    return CommandTemplate{f.string("verb"), f.strings("args"), f.optional_string("precondition")};
  }
  throw FormatError(f.at("kind"), "unknown template kind `" + kind + "`");
}

Feature parse_feature(const json& j, const std::string& where) {
  Fields f(j, where, {"id", "name", "parent", "variation", "group", "attributes", "dynamic", "artifact_templates"});
  Feature out;
  out.id = f.string("id");
  out.name = f.string("name");
  out.parent = f.optional_string("parent");
  if (out.parent) {
    auto variation = f.string("variation");
    if (variation == "mandatory") {
      out.variation = Variation::Mandatory;
    } else if (variation == "optional") {
      out.variation = Variation::Optional;
    } else {
      throw FormatError(f.at("variation"), "unknown variation `" + variation + "`");
    }
  } else if (f.has("variation")) {
    // Meaningless on the root; accept and ignore the canonical "mandatory".
    if (f.string("variation") != "mandatory" && f.string("variation") != "optional") {
      throw FormatError(f.at("variation"), "unknown variation");
    }
    out.variation = Variation::Mandatory;
  } else {
    out.variation = Variation::Mandatory;
  }
  if (const json* g = f.optional("group")) {
    Fields gf(*g, f.at("group"), {"min", "max", "members"});
    auto min = gf.integer("min");
    auto max = gf.integer("max");
    if (min < 0 || max < 0) throw FormatError(f.at("group"), "negative cardinality");
    out.group = Group{static_cast<std::size_t>(min), static_cast<std::size_t>(max), gf.strings("members")};
  }
  const json& attrs = f.array("attributes");
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    auto at = item_path(f.at("attributes"), i);
    Fields af(attrs[i], at, {"name", "domain", "default"});
    AttributeSpec spec{af.string("name"), parse_domain(af.required("domain"), af.at("domain")), af.value("default")};
    if (out.attributes.count(spec.name) != 0) throw FormatError(at, "duplicate attribute `" + spec.name + "`");
    out.attributes.emplace(spec.name, std::move(spec));
  }
  out.dynamic = f.boolean("dynamic", false);
  const json& templates = f.array("artifact_templates");
  for (std::size_t i = 0; i < templates.size(); ++i) {
    out.artifact_templates.push_back(parse_template(templates[i], item_path(f.at("artifact_templates"), i)));
  }
  return out;
}

CrossTreeConstraint parse_constraint(const json& j, const std::string& where) {
  Fields f(j, where, {"kind", "feature", "target", "attr", "op", "literal"});
  auto kind = f.string("kind");
  if (kind == "requires" || kind == "excludes") {
    if (f.has("attr") || f.has("op") || f.has("literal")) throw FormatError(where, kind + " takes `feature` and `target`");
    if (kind == "requires") return Requires{f.string("feature"), f.string("target")};
    return Excludes{f.string("feature"), f.string("target")};
  }
  if (kind == "attr_predicate") {
    if (f.has("target")) throw FormatError(f.at("target"), "attr_predicate takes no target");
    auto op = parse_comparator(f.string("op"));
    if (!op) throw FormatError(f.at("op"), "unknown comparator");
    return AttrPredicate{f.string("feature"), f.string("attr"), *op, f.value("literal")};
  }
  throw FormatError(f.at("kind"), "unknown constraint kind `" + kind + "`");
}

json domain_json(const AttributeDomain& d) {
  if (const auto* r = std::get_if<IntRange>(&d.repr())) return json{{"range", json::array({r->lo, r->hi})}};
  json values = json::array();
  for (const auto& v : d.values()) values.push_back(to_json(v));
  return json{{"enum", values}};
}

json template_json(const ArtifactTemplate& t) {
  if (const auto* e = std::get_if<ConfigEntryTemplate>(&t)) {
    return json{{"kind", "config"}, {"key", e->key}, {"value", e->value}};
  }
  const auto& c = std::get<CommandTemplate>(t);
  json out{{"kind", "command"}, {"verb", c.verb}, {"args", c.args}};
  out["precondition"] = c.precondition ? json(*c.precondition) : json(nullptr);
  return out;
}

json constraint_json(const CrossTreeConstraint& c) {
  if (const auto* r = std::get_if<Requires>(&c)) return json{{"kind", "requires"}, {"feature", r->feature}, {"target", r->required}};
  if (const auto* x = std::get_if<Excludes>(&c)) return json{{"kind", "excludes"}, {"feature", x->feature}, {"target", x->excluded}};
  const auto& p = std::get<AttrPredicate>(c);
  return json{{"kind", "attr_predicate"},
              {"feature", p.feature},
              {"attr", p.attr},
              {"op", std::string(to_string(p.op))},
              {"literal", to_json(p.literal)}};
}

}  // namespace

FeatureModel feature_model_from_json(const json& doc) {
  Fields f(doc, "", {"model_id", "provider_id", "layer", "features", "constraints"});
  auto layer = parse_layer(f.string("layer"), f.at("layer"));
  std::vector<Feature> features;
  const json& fs = f.array("features");
  for (std::size_t i = 0; i < fs.size(); ++i) features.push_back(parse_feature(fs[i], item_path(f.at("features"), i)));
  std::vector<CrossTreeConstraint> constraints;
  const json& cs = f.array("constraints");
  for (std::size_t i = 0; i < cs.size(); ++i) constraints.push_back(parse_constraint(cs[i], item_path(f.at("constraints"), i)));
  return FeatureModel(f.string("model_id"), f.string("provider_id"), layer, std::move(features), std::move(constraints));
}

FeatureModel parse_feature_model(std::string_view text) { return feature_model_from_json(detail::parse_json(text)); }

json to_json(const FeatureModel& model) {
  json features = json::array();
  for (const auto& [id, f] : model.features()) {
    json attrs = json::array();
    for (const auto& [name, spec] : f.attributes) {
      attrs.push_back(json{{"name", name}, {"domain", domain_json(spec.domain)}, {"default", to_json(spec.default_value)}});
    }
    json templates = json::array();
    for (const auto& t : f.artifact_templates) templates.push_back(template_json(t));
    json jf{{"id", f.id},
            {"name", f.name},
            {"variation", std::string(to_string(f.variation))},
            {"attributes", attrs},
            {"dynamic", f.dynamic},
            {"artifact_templates", templates}};
    jf["parent"] = f.parent ? json(*f.parent) : json(nullptr);
    jf["group"] = f.group ? json{{"min", f.group->min}, {"max", f.group->max}, {"members", f.group->members}} : json(nullptr);
    features.push_back(std::move(jf));
  }
  json constraints = json::array();
  for (const auto& c : model.constraints()) constraints.push_back(constraint_json(c));
  return json{{"model_id", model.model_id()},
              {"provider_id", model.provider_id()},
              {"layer", std::string(to_string(model.layer()))},
              {"features", features},
              {"constraints", constraints}};
}

std::string serialize(const FeatureModel& model) { return to_json(model).dump(); }

std::string model_digest(const FeatureModel& model) { return sha256_hex(serialize(model)); }

}  // namespace dspl
