#include "dspl/selection.hpp"

#include <algorithm>
#include <charconv>

#include "dspl/error.hpp"
#include "solver.hpp"

namespace dspl {

using detail::Assignment;
using detail::Index;
using detail::kUndecided;
using nlohmann::json;

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("not a rational number: `" + std::string(whole) + "`");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw Error("zero denominator in `" + std::string(text) + "`");
    return Rational(parse_int(text.substr(0, slash), text), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 12 || frac.front() == '-' || frac.front() == '+') {
      throw Error("not a rational number: `" + std::string(text) + "`");
    }
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    auto whole = text.substr(0, dot);
    bool negative = !whole.empty() && whole.front() == '-';
    std::int64_t ip = (whole.empty() || whole == "-") ? 0 : parse_int(whole, text);
    std::int64_t fp = parse_int(frac, text);
    std::int64_t num = (negative ? -1 : 1) * (std::abs(ip) * scale + fp);
    return Rational(num, scale);
  }
  return Rational(parse_int(text, text));
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

void Objective::check() const {
  if (w_cost < 0 || w_csl < 0) throw Error("objective weights must be non-negative");
  if (w_cost + w_csl <= 0) throw Error("objective weights must not both be zero");
}

json to_json(const ScoredConfiguration& scored) {
  return json{{"provider_id", scored.provider_id},
              {"model_id", scored.configuration.model_id},
              {"configuration", to_json(scored.configuration)},
              {"cost", scored.cost},
              {"csl", to_string(scored.csl)},
              {"cost_scale", scored.cost_scale},
              {"score", to_string(scored.score)}};
}

std::int64_t configuration_cost(const FeatureModel& fm, const Configuration& cfg, const std::string& cost_attr) {
  std::int64_t total = 0;
  for (const auto& id : cfg.selected) {
    const Feature& f = fm.feature(id);
    auto spec = f.attributes.find(cost_attr);
    if (spec == f.attributes.end()) continue;
    auto bound = cfg.bindings.find({id, cost_attr});
    const Value& v = bound != cfg.bindings.end() ? bound->second : spec->second.default_value;
    if (const auto* i = std::get_if<std::int64_t>(&v)) total += *i;
  }
  return total;
}

Rational customer_satisfaction(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req) {
  std::int64_t applicable = 0;
  std::int64_t met = 0;
  for (const auto& r : req.preferred) {
    if (!r.applies_to(fm)) continue;
    ++applicable;
    met += satisfies(fm, cfg, r);
  }
  return applicable == 0 ? Rational(1) : Rational(met, applicable);
}

std::int64_t cost_scale(const FeatureModel& fm, const std::string& cost_attr) {
  std::int64_t total = 0;
  for (const auto& [id, f] : fm.features()) {
    auto spec = f.attributes.find(cost_attr);
    if (spec == f.attributes.end()) continue;
    std::int64_t best = 0;
    for (const auto& v : spec->second.domain.values()) {
      if (const auto* i = std::get_if<std::int64_t>(&v)) best = std::max(best, *i);
    }
    total += best;
  }
  return std::max<std::int64_t>(total, 1);
}

Rational score(const Objective& obj, std::int64_t cost, const Rational& csl, std::int64_t scale) {
  return obj.w_cost * cost - obj.w_csl * csl * scale;
}

bool meets_requirements(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req) {
  return std::all_of(req.required.begin(), req.required.end(),
                     [&](const FeatureRequirement& r) { return !r.applies_to(fm) || satisfies(fm, cfg, r); });
}

std::vector<std::string> match_providers(const RequirementSet& req, const std::vector<FeatureModel>& catalog) {
  std::vector<std::string> out;
  for (const auto& fm : catalog) {
    bool ok = std::all_of(req.required.begin(), req.required.end(),
                          [&](const FeatureRequirement& r) { return !r.applies_to(fm) || domain_satisfiable(fm, r); });
    if (ok) out.push_back(fm.model_id());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

/// Index restricted by the required attribute constraints, and the
/// assignment that selects every required feature.
std::optional<std::pair<Index, Assignment>> prepare(const FeatureModel& fm, const RequirementSet& req) {
  Index ix(fm);
  Assignment a(ix.ids.size(), kUndecided);
  for (const auto& r : req.required) {
    if (!r.applies_to(fm)) continue;
    const Feature* f = fm.find_by_name(r.feature_name);
    if (f == nullptr) return std::nullopt;
    int i = ix.pos.at(f->id);
    a[i] = 1;
    if (r.attr_constraint && !ix.restrict_slot(i, r.attr_constraint->attr, r.attr_constraint->op, r.attr_constraint->literal)) {
      return std::nullopt;
    }
  }
  return std::pair{std::move(ix), std::move(a)};
}

}  // namespace

std::optional<Configuration> find_valid_configuration(const FeatureModel& fm, const RequirementSet& req) {
  auto prepared = prepare(fm, req);
  if (!prepared) return std::nullopt;
  const auto& [ix, seed] = *prepared;
  std::optional<Configuration> found;
  detail::search(ix, seed, [&](const Assignment& a) {
    auto slots = detail::selected_slots(ix, a);
    found = detail::make_configuration(ix, a, std::vector<std::size_t>(slots.size(), 0));
    return false;
  });
  return found;
}

std::optional<ScoredConfiguration> optimize_configuration(const FeatureModel& fm, const RequirementSet& req,
                                                          const Objective& obj) {
  obj.check();
  auto prepared = prepare(fm, req);
  if (!prepared) return std::nullopt;
  const auto& [ix, seed] = *prepared;

  std::vector<const FeatureRequirement*> preferred;
  for (const auto& r : req.preferred) {
    if (r.applies_to(fm)) preferred.push_back(&r);
  }
  const std::int64_t scale = cost_scale(fm, obj.cost_attr);
  const Rational per_preference =
      preferred.empty() ? Rational(0) : obj.w_csl * scale / static_cast<std::int64_t>(preferred.size());

  std::optional<ScoredConfiguration> best;
  detail::search(ix, seed, [&](const Assignment& a) {
    std::vector<int> owners;
    auto slots = detail::selected_slots(ix, a, &owners);
    // The objective is separable over attribute slots: each slot adds its
    // own cost and the preferences that constrain it.
    std::vector<std::size_t> choice(slots.size(), 0);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto& name = fm.feature(ix.ids[owners[k]]).name;
      std::optional<Rational> best_contrib;
      for (std::size_t v = 0; v < slots[k]->allowed.size(); ++v) {
        const Value& value = slots[k]->allowed[v];
        Rational contrib(0);
        if (slots[k]->attr == obj.cost_attr) {
          if (const auto* i = std::get_if<std::int64_t>(&value)) contrib += obj.w_cost * *i;
        }
        for (const auto* r : preferred) {
          if (r->feature_name == name && r->attr_constraint && r->attr_constraint->attr == slots[k]->attr &&
              compare(value, r->attr_constraint->op, r->attr_constraint->literal)) {
            contrib -= per_preference;
          }
        }
        if (!best_contrib || contrib < *best_contrib) {
          best_contrib = contrib;
          choice[k] = v;
        }
      }
    }
    ScoredConfiguration candidate;
    candidate.provider_id = fm.provider_id();
    candidate.configuration = detail::make_configuration(ix, a, choice);
    candidate.cost = configuration_cost(fm, candidate.configuration, obj.cost_attr);
    candidate.csl = customer_satisfaction(fm, candidate.configuration, req);
    candidate.cost_scale = scale;
    candidate.score = score(obj, candidate.cost, candidate.csl, scale);
    if (!best || candidate.score < best->score ||
        (candidate.score == best->score && canonical_less(fm, candidate.configuration, best->configuration))) {
      best = std::move(candidate);
    }
    return true;
  });
  return best;
}

std::optional<ScoredConfiguration> select_best(const RequirementSet& req, const std::vector<FeatureModel>& catalog,
                                               const Objective& obj) {
  std::optional<ScoredConfiguration> best;
  for (const auto& model_id : match_providers(req, catalog)) {
    auto it = std::find_if(catalog.begin(), catalog.end(), [&](const FeatureModel& m) { return m.model_id() == model_id; });
    auto scored = optimize_configuration(*it, req, obj);
    if (scored && (!best || scored->score < best->score)) best = std::move(scored);
  }
  return best;
}

}  // namespace dspl
