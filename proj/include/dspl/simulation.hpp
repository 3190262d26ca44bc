#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dspl/agents.hpp"
#include "dspl/mape.hpp"

namespace dspl {

struct ConsumerProfile {
  std::string consumer_id;
  ContextSnapshot context;
  Objective objective;
};

/// `{consumer_id, context:{timestamp, dimensions}, objective:{w_cost,
/// w_csl, cost_attr}}`; weights are integers or rational strings.
ConsumerProfile parse_consumer(std::string_view text);
ConsumerProfile consumer_from_json(const nlohmann::json& doc);

struct Scenario {
  std::vector<FeatureModel> catalog;
  ConsumerProfile consumer;
  GoalModel goals;
  std::vector<MappingRule> mapping;
  std::vector<AdaptationRule> rules;
  std::vector<ContextEvent> events;
};

struct SimulationResult {
  Deployment deployment;
  LoopState state;
  std::size_t messages = 0;
  std::size_t rounds = 0;
};

/// Agent id of the provider agent for one layer of one provider.
std::string provider_agent_id(const std::string& provider_id, Layer layer);

/// Runs the scenario on the message bus: capability exchange, initial
/// deployment by the owning provider agent, then one MAPE pass per event
/// tick driven by consumer INFORMs. The trace equals the one run_loop
/// writes for the same inputs. Returns none when no model matches the
/// derived requirements. Delivered messages go to `dump` when given.
std::optional<SimulationResult> simulate(const Scenario& scenario, TraceLog trace, std::ostream* dump = nullptr);

nlohmann::json summary_json(const SimulationResult& result);

}  // namespace dspl
