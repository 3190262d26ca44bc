#include "dspl/mape.hpp"

#include <algorithm>
#include <map>

#include "dspl/error.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

namespace {

void check_action(const FeatureModel& fm, const Action& action, const std::string& where) {
  const Feature* f = fm.find(action_feature(action));
  if (f == nullptr) throw FormatError(where, "unknown feature " + action_feature(action) + " in " + fm.model_id());
  if (!f->dynamic) throw FormatError(where, "feature " + f->id + " is not dynamic");
  if (const auto* set = std::get_if<SetAttribute>(&action)) {
    auto it = f->attributes.find(set->attr);
    if (it == f->attributes.end()) throw FormatError(where, "unknown attribute " + f->id + "." + set->attr);
    if (!it->second.domain.contains(set->value)) {
      throw FormatError(where, "value " + to_string(set->value) + " outside the domain of " + f->id + "." + set->attr);
    }
  }
}

std::map<std::string, const FeatureModel*> by_model_id(const std::vector<FeatureModel>& catalog) {
  std::map<std::string, const FeatureModel*> out;
  for (const auto& fm : catalog) out.emplace(fm.model_id(), &fm);
  return out;
}

}  // namespace

std::vector<AdaptationRule> rules_from_json(const json& doc, const std::vector<FeatureModel>& catalog) {
  auto models = by_model_id(catalog);
  Fields f(doc, "", {"rules"});
  const json& items = f.array("rules");
  std::vector<AdaptationRule> rules;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto where = detail::item_path(f.at("rules"), i);
    Fields rf(items[i], where, {"rule_id", "scope", "condition", "actions"});
    auto rule_id = rf.string("rule_id");
    auto scope = rf.string("scope");
    auto model = models.find(scope);
    if (model == models.end()) throw FormatError(rf.at("scope"), "unknown model: " + scope);
    std::optional<ContextPredicate> condition;
    try {
      condition = ContextPredicate::parse(rf.string("condition"));
    } catch (const FormatError& e) {
      throw FormatError(rf.at("condition"), e.detail());
    }
    AdaptationRule rule{rule_id, *condition, {}, scope};
    const json& actions = rf.array("actions");
    for (std::size_t a = 0; a < actions.size(); ++a) {
      auto action_path = detail::item_path(rf.at("actions"), a);
      rule.actions.push_back(action_from_json(actions[a], action_path));
      check_action(*model->second, rule.actions.back(), action_path);
    }
    for (const auto& other : rules) {
      if (other.rule_id == rule.rule_id) throw FormatError(rf.at("rule_id"), "duplicate rule id: " + rule_id);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<AdaptationRule> parse_rules(std::string_view text, const std::vector<FeatureModel>& catalog) {
  return rules_from_json(detail::parse_json(text), catalog);
}

json to_json(const AdaptationRule& rule) {
  return json{{"rule_id", rule.rule_id},
              {"scope", rule.scope},
              {"condition", rule.condition.str()},
              {"actions", to_json(rule.actions)}};
}

std::string_view to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::Direct:
      return "direct";
    case PlanStatus::Reselected:
      return "reselected";
    case PlanStatus::Rejected:
      return "rejected";
  }
  return "?";
}

json to_json(const AdaptationPlan& plan) {
  return json{{"tick", plan.tick},
              {"trigger", plan.trigger.str()},
              {"actions", to_json(plan.actions)},
              {"target_config", to_json(plan.target_config)},
              {"provider_id", plan.provider_id},
              {"bundle_digest", plan.bundle.digest},
              {"status", std::string(to_string(plan.status))}};
}

std::optional<Deployment> plan_deployment(const GoalModel& goals, const std::vector<MappingRule>& mapping,
                                          const std::vector<FeatureModel>& catalog, const ContextSnapshot& snapshot,
                                          const Objective& obj) {
  auto active = active_goals(goals, snapshot);
  auto req = derive_requirements(std::set<std::string>(active.begin(), active.end()), mapping);
  auto best = select_best(req, catalog, obj);
  if (!best) return std::nullopt;
  auto bundle = derive_bundle(catalog_model(catalog, best->configuration.model_id), best->configuration);
  return Deployment{std::move(req), std::move(*best), std::move(bundle)};
}

LoopState initial_state(const ContextSnapshot& snapshot, const Deployment& deployment, TraceLog trace) {
  SimEnvironment env{deployment.selection.provider_id, {}, {}};
  auto report = run_bundle(env, deployment.bundle);
  if (!report.ok) throw Error("initial deployment failed at `" + report.failed_command.value_or("") + "`");
  return LoopState{snapshot, deployment.selection.configuration, deployment.selection.provider_id, std::move(env),
                   std::move(trace)};
}

std::vector<ContextChange> context_delta(const ContextSnapshot& before, const ContextSnapshot& after) {
  std::vector<ContextChange> out;
  for (const auto& [path, value] : after.dimensions) {
    const Value* old = before.find(path);
    if (old != nullptr && *old == value) continue;
    out.push_back(ContextChange{path, old ? std::optional<Value>(*old) : std::nullopt, value});
  }
  return out;
}

std::vector<ContextChange> monitor_step(LoopState& state, std::span<const ContextEvent> events) {
  ContextSnapshot next = state.snapshot;
  for (const auto& ev : preprocess_events(events)) next = apply_event(next, ev);
  auto delta = context_delta(state.snapshot, next);
  state.snapshot = std::move(next);
  return delta;
}

std::optional<AdaptationNeed> analyze_step(const LoopState& state, std::int64_t tick,
                                           const std::vector<ContextChange>& delta,
                                           const std::vector<AdaptationRule>& rules) {
  if (delta.empty()) return std::nullopt;
  std::vector<const AdaptationRule*> matched;
  for (const auto& rule : rules) {
    if (rule.scope != state.current_config.model_id) continue;
    bool touched = std::any_of(delta.begin(), delta.end(),
                               [&](const ContextChange& c) { return rule.condition.mentions(c.path); });
    if (touched && rule.condition.holds(state.snapshot.dimensions)) matched.push_back(&rule);
  }
  if (matched.empty()) return std::nullopt;
  std::stable_sort(matched.begin(), matched.end(),
                   [](const auto* a, const auto* b) { return a->rule_id < b->rule_id; });

  std::vector<Atom> atoms;
  for (const auto& c : delta) atoms.push_back(Atom{c.path, Comparator::Eq, c.after});
  AdaptationNeed need{tick, ContextPredicate(std::move(atoms)), {}, {}};
  for (const auto* rule : matched) {
    need.matched_rules.push_back(rule->rule_id);
    for (const auto& action : rule->actions) need.affected_dynamic_features.insert(action_feature(action));
  }
  return need;
}

namespace {

/// Binds the default of every unbound attribute on a selected feature.
std::vector<Action> default_bindings(const FeatureModel& fm, const Configuration& cfg) {
  std::vector<Action> out;
  for (const auto& id : cfg.selected) {
    const Feature* f = fm.find(id);
    if (f == nullptr) continue;
    for (const auto& [attr, spec] : f->attributes) {
      if (cfg.bindings.count({id, attr}) == 0) out.push_back(SetAttribute{id, attr, spec.default_value});
    }
  }
  return out;
}

bool acceptable(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req) {
  try {
    return validate_configuration(fm, cfg).valid() && meets_requirements(fm, cfg, req);
  } catch (const ConfigurationError&) {
    return false;
  }
}

}  // namespace

AdaptationPlan plan_step(const LoopState& state, const AdaptationNeed& need, const std::vector<AdaptationRule>& rules,
                         const std::vector<FeatureModel>& catalog, const RequirementSet& req, const Objective& obj) {
  const Configuration& current = state.current_config;
  const FeatureModel& fm = catalog_model(catalog, current.model_id);

  std::vector<Action> actions;
  for (const auto& id : need.matched_rules) {
    auto rule = std::find_if(rules.begin(), rules.end(), [&](const AdaptationRule& r) { return r.rule_id == id; });
    if (rule == rules.end()) throw LookupError("unknown adaptation rule: " + id);
    actions.insert(actions.end(), rule->actions.begin(), rule->actions.end());
  }
  Configuration direct = apply_actions(current, actions);
  auto defaults = default_bindings(fm, direct);
  direct = apply_actions(std::move(direct), defaults);
  std::vector<Action> direct_actions = actions;
  direct_actions.insert(direct_actions.end(), defaults.begin(), defaults.end());

  if (acceptable(fm, direct, req)) {
    try {
      auto bundle = derive_bundle(fm, direct);
      return AdaptationPlan{need.tick,      need.delta,        std::move(direct_actions), std::move(direct),
                            state.provider_id, std::move(bundle), PlanStatus::Direct};
    } catch (const DerivationError&) {
    }
  }

  auto matched = match_providers(req, catalog);
  std::stable_partition(matched.begin(), matched.end(), [&](const std::string& id) { return id == current.model_id; });
  for (const auto& model_id : matched) {
    const FeatureModel& candidate = catalog_model(catalog, model_id);
    auto scored = optimize_configuration(candidate, req, obj);
    if (!scored) continue;
    try {
      auto bundle = derive_bundle(candidate, scored->configuration);
      Configuration base = model_id == current.model_id ? current : Configuration{model_id, {}, {}};
      return AdaptationPlan{need.tick,
                            need.delta,
                            diff_actions(base, scored->configuration),
                            scored->configuration,
                            candidate.provider_id(),
                            std::move(bundle),
                            PlanStatus::Reselected};
    } catch (const DerivationError&) {
    }
  }
  return AdaptationPlan{need.tick, need.delta, std::move(actions), current, state.provider_id, {}, PlanStatus::Rejected};
}

TraceEntry make_trace_entry(const AdaptationPlan& plan, const Configuration& pre, const Configuration& post,
                            const std::string& provider_id, Outcome outcome) {
  return TraceEntry{0,
                    plan.tick,
                    plan.trigger,
                    plan.actions,
                    config_digest(pre),
                    config_digest(post),
                    outcome,
                    provider_id,
                    post.model_id};
}

SimEnvironment execution_environment(const LoopState& state, const AdaptationPlan& plan) {
  if (plan.provider_id != state.provider_id) return SimEnvironment{plan.provider_id, {}, {}};
  return state.environment;
}

Outcome complete_execution(LoopState& state, const AdaptationPlan& plan, const ExecutionReport& report,
                           SimEnvironment env) {
  Configuration pre = state.current_config;
  if (plan.status == PlanStatus::Rejected) {
    state.trace.record(make_trace_entry(plan, pre, pre, state.provider_id, Outcome::RejectedInvalid));
    return Outcome::RejectedInvalid;
  }
  if (!report.ok || !verify_environment(env, plan.bundle)) {
    state.trace.record(make_trace_entry(plan, pre, pre, state.provider_id, Outcome::FailedExecution));
    return Outcome::FailedExecution;
  }
  state.environment = std::move(env);
  state.current_config = plan.target_config;
  state.provider_id = plan.provider_id;
  state.trace.record(make_trace_entry(plan, pre, state.current_config, state.provider_id, Outcome::Applied));
  return Outcome::Applied;
}

Outcome execute_step(LoopState& state, const AdaptationPlan& plan) {
  if (plan.status == PlanStatus::Rejected) return complete_execution(state, plan, ExecutionReport{}, {});
  SimEnvironment env = execution_environment(state, plan);
  auto report = run_bundle(env, plan.bundle);
  return complete_execution(state, plan, report, std::move(env));
}

TickResult step_tick(LoopState& state, std::int64_t tick, std::span<const ContextEvent> events,
                     const std::vector<AdaptationRule>& rules, const std::vector<FeatureModel>& catalog,
                     const RequirementSet& req, const Objective& obj) {
  TickResult result;
  result.delta = monitor_step(state, events);
  result.need = analyze_step(state, tick, result.delta, rules);
  if (!result.need) return result;
  result.plan = plan_step(state, *result.need, rules, catalog, req, obj);
  result.outcome = execute_step(state, *result.plan);
  return result;
}

void run_loop(LoopState& state, std::span<const ContextEvent> events, const std::vector<AdaptationRule>& rules,
              const std::vector<FeatureModel>& catalog, const RequirementSet& req, const Objective& obj,
              const std::function<void(std::int64_t, const TickResult&, const LoopState&)>& on_tick) {
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    while (j < events.size() && events[j].tick == events[i].tick) ++j;
    if (j < events.size() && events[j].tick < events[i].tick) throw OrderError("out_of_order: events are not sorted");
    auto result = step_tick(state, events[i].tick, events.subspan(i, j - i), rules, catalog, req, obj);
    if (on_tick) on_tick(events[i].tick, result, state);
    i = j;
  }
}

}  // namespace dspl
