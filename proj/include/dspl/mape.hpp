#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/action.hpp"
#include "dspl/context.hpp"
#include "dspl/derivation.hpp"
#include "dspl/goal_model.hpp"
#include "dspl/knowledge.hpp"
#include "dspl/mapping.hpp"
#include "dspl/predicate.hpp"
#include "dspl/selection.hpp"

namespace dspl {

/// Event-condition-action rule over one model's dynamic features.
struct AdaptationRule {
  std::string rule_id;
  ContextPredicate condition;
  std::vector<Action> actions;
  std::string scope;
};

/// Throws FormatError on malformed documents, duplicate rule ids, unknown
/// scope models, and actions that touch unknown or non-dynamic features or
/// set undeclared attributes or out-of-domain values.
std::vector<AdaptationRule> parse_rules(std::string_view text, const std::vector<FeatureModel>& catalog);
std::vector<AdaptationRule> rules_from_json(const nlohmann::json& doc, const std::vector<FeatureModel>& catalog);
nlohmann::json to_json(const AdaptationRule& rule);

struct AdaptationNeed {
  std::int64_t tick = 0;
  /// Conjunction of `path == new value` over the changed paths.
  ContextPredicate delta;
  std::vector<std::string> matched_rules;
  std::set<std::string> affected_dynamic_features;
};

enum class PlanStatus { Direct, Reselected, Rejected };

std::string_view to_string(PlanStatus status);

struct AdaptationPlan {
  std::int64_t tick = 0;
  ContextPredicate trigger;
  std::vector<Action> actions;
  Configuration target_config;
  std::string provider_id;
  ConfigBundle bundle;
  PlanStatus status = PlanStatus::Rejected;
};

nlohmann::json to_json(const AdaptationPlan& plan);

struct LoopState {
  ContextSnapshot snapshot;
  Configuration current_config;
  std::string provider_id;
  SimEnvironment environment;
  TraceLog trace;
};

/// Requirements derived from the goals active in the initial context, the
/// selected configuration and its bundle.
struct Deployment {
  RequirementSet requirements;
  ScoredConfiguration selection;
  ConfigBundle bundle;
};

/// None when no catalog model can meet the derived requirements.
std::optional<Deployment> plan_deployment(const GoalModel& goals, const std::vector<MappingRule>& mapping,
                                          const std::vector<FeatureModel>& catalog, const ContextSnapshot& snapshot,
                                          const Objective& obj);

/// Runs the deployment bundle on a fresh environment. Throws Error when
/// the bundle fails.
LoopState initial_state(const ContextSnapshot& snapshot, const Deployment& deployment, TraceLog trace);

/// Delta between a snapshot and the same snapshot after `events`, sorted
/// by path.
std::vector<ContextChange> context_delta(const ContextSnapshot& before, const ContextSnapshot& after);

/// Applies the events of one tick and returns the paths whose value
/// actually changed. Throws OrderError on stale or unsorted events.
std::vector<ContextChange> monitor_step(LoopState& state, std::span<const ContextEvent> events);

/// Rules scoped to the current model whose condition mentions a changed
/// path and holds on the current snapshot, in rule id order.
std::optional<AdaptationNeed> analyze_step(const LoopState& state, std::int64_t tick,
                                           const std::vector<ContextChange>& delta,
                                           const std::vector<AdaptationRule>& rules);

/// Rule actions first (with defaults bound for newly selected features);
/// when the result is invalid or misses a requirement, re-selection on the
/// current model, then the other matched models by id.
AdaptationPlan plan_step(const LoopState& state, const AdaptationNeed& need, const std::vector<AdaptationRule>& rules,
                         const std::vector<FeatureModel>& catalog, const RequirementSet& req, const Objective& obj);

/// Trace entry for a finished plan; `outcome` decides which configuration
/// the post digest describes.
TraceEntry make_trace_entry(const AdaptationPlan& plan, const Configuration& pre, const Configuration& post,
                            const std::string& provider_id, Outcome outcome);

/// Environment the plan runs on: the current one, or a fresh one when the
/// plan moves to another provider.
SimEnvironment execution_environment(const LoopState& state, const AdaptationPlan& plan);

/// Second half of execution once the bundle ran on `env`: adopts the
/// target configuration and environment on success, keeps the state
/// otherwise, then records the trace entry. Rejected plans ignore the
/// report.
Outcome complete_execution(LoopState& state, const AdaptationPlan& plan, const ExecutionReport& report,
                           SimEnvironment env);

/// Runs the plan's bundle, swaps in the target configuration on success
/// and records the trace entry after the state update.
Outcome execute_step(LoopState& state, const AdaptationPlan& plan);

struct TickResult {
  std::vector<ContextChange> delta;
  std::optional<AdaptationNeed> need;
  std::optional<AdaptationPlan> plan;
  std::optional<Outcome> outcome;
};

TickResult step_tick(LoopState& state, std::int64_t tick, std::span<const ContextEvent> events,
                     const std::vector<AdaptationRule>& rules, const std::vector<FeatureModel>& catalog,
                     const RequirementSet& req, const Objective& obj);

/// Groups the (sorted) events by tick and runs one step per tick.
void run_loop(LoopState& state, std::span<const ContextEvent> events, const std::vector<AdaptationRule>& rules,
              const std::vector<FeatureModel>& catalog, const RequirementSet& req, const Objective& obj,
              const std::function<void(std::int64_t, const TickResult&, const LoopState&)>& on_tick = {});

}  // namespace dspl
