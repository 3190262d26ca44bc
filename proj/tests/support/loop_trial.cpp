#include "support/loop_trial.hpp"

#include "dspl/configuration.hpp"
#include "dspl/error.hpp"
#include "support/oracle.hpp"

namespace dspl::testing {

std::optional<LoopScenario> random_loop_scenario(std::uint64_t seed) {
  Rng rng(seed);
  ModelParams params;
  params.max_features = 8;
  params.dynamic_probability = 0.6;
  params.templates = true;
  LoopScenario s;
  for (int m = 0; m < 2; ++m) {
    params.model_id = "M" + std::to_string(m);
    params.provider_id = "P" + std::to_string(m);
    s.catalog.push_back(random_model(rng, params));
  }
  s.requirements = random_requirements(rng, s.catalog[0]);
  s.objective = Objective{Rational(1), Rational(1), "cost"};
  for (const auto& fm : s.catalog) {
    for (auto& r : random_rules(rng, fm, 4)) {
      r.rule_id = fm.model_id() + "." + r.rule_id;
      s.rules.push_back(std::move(r));
    }
  }
  s.events = random_events(rng, 12);

  auto best = select_best(s.requirements, s.catalog, s.objective);
  if (!best) return std::nullopt;
  auto bundle = derive_bundle(catalog_model(s.catalog, best->configuration.model_id), best->configuration);
  SimEnvironment probe{best->provider_id, {}, {}};
  if (!run_bundle(probe, bundle).ok) return std::nullopt;
  s.deployment = Deployment{s.requirements, *best, bundle};
  return s;
}

LoopTrial run_loop_trial(std::uint64_t seed) {
  std::optional<LoopScenario> s;
  for (std::uint64_t k = 0; !s; ++k) s = random_loop_scenario(seed * 7919 + k);

  auto state = initial_state(base_snapshot(), s->deployment, TraceLog::memory());
  LoopTrial out;
  out.initial_digest = config_digest(state.current_config);
  auto healthy = [&](const LoopState& st) {
    const auto& fm = catalog_model(s->catalog, st.current_config.model_id);
    return validate_configuration(fm, st.current_config).violations.empty() &&
           meets_requirements(fm, st.current_config, s->requirements) &&
           verify_environment(st.environment, derive_bundle(fm, st.current_config)) &&
           st.environment.provider_id == st.provider_id && fm.provider_id() == st.provider_id;
  };
  if (!healthy(state)) ++out.violations;
  run_loop(state, s->events, s->rules, s->catalog, s->requirements, s->objective,
           [&](std::int64_t, const TickResult&, const LoopState& st) {
             ++out.ticks;
             if (!healthy(st)) ++out.violations;
           });
  out.entries = state.trace.recorded().size();
  out.final_digest = config_digest(state.current_config);
  out.replay_digest = config_digest(replay_trace(s->deployment.selection.configuration, state.trace.recorded()));
  for (const auto& e : state.trace.recorded()) out.trace_lines.push_back(trace_line(e));
  return out;
}

}  // namespace dspl::testing
