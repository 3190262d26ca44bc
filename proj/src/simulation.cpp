#include "dspl/simulation.hpp"

#include <algorithm>
#include <map>

#include "dspl/error.hpp"
#include "json_util.hpp"

namespace dspl {

using detail::Fields;
using nlohmann::json;

namespace {

Rational weight(const Fields& f, std::string_view key, Rational fallback) {
  const json* j = f.optional(key);
  if (j == nullptr) return fallback;
  try {
    if (j->is_number_integer()) return Rational(j->get<std::int64_t>());
    if (j->is_string()) return parse_rational(j->get<std::string>());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(f.at(key), e.what());
  }
  throw FormatError(f.at(key), "expected an integer or a rational string");
}

constexpr std::string_view kManager = "manager";

}  // namespace

ConsumerProfile consumer_from_json(const json& doc) {
  Fields f(doc, "", {"consumer_id", "context", "objective"});
  ConsumerProfile out{f.string("consumer_id"), snapshot_from_json(f.required("context"), f.at("context")), {}};
  if (const json* o = f.optional("objective")) {
    Fields of(*o, f.at("objective"), {"w_cost", "w_csl", "cost_attr"});
    out.objective.w_cost = weight(of, "w_cost", 1);
    out.objective.w_csl = weight(of, "w_csl", 1);
    out.objective.cost_attr = of.optional_string("cost_attr").value_or("cost");
    try {
      out.objective.check();
    } catch (const Error& e) {
      throw FormatError(f.at("objective"), e.what());
    }
  }
  return out;
}

ConsumerProfile parse_consumer(std::string_view text) { return consumer_from_json(detail::parse_json(text)); }

std::string provider_agent_id(const std::string& provider_id, Layer layer) {
  return "provider:" + provider_id + ":" + std::string(to_string(layer));
}

namespace {

struct Pending {
  AdaptationPlan plan;
  std::string consumer_conversation;
};

class Runtime {
 public:
  Runtime(const Scenario& s, Deployment deployment, TraceLog trace, std::ostream* dump)
      : s_(s),
        deployment_(std::move(deployment)),
        consumer_id_("consumer:" + s.consumer.consumer_id),
        consumer_snapshot_(s.consumer.context),
        state_{s.consumer.context, Configuration{}, {}, {}, std::move(trace)} {
    bus_.set_dump(dump);
    bus_.register_agent(AgentDescriptor{consumer_id_, Role::Consumer, s.goals, {}});
    bus_.register_agent(AgentDescriptor{std::string(kManager), Role::Manager, std::nullopt, {}});
    std::map<std::string, AgentDescriptor> providers;
    for (const auto& fm : s.catalog) {
      auto id = provider_agent_id(fm.provider_id(), fm.layer());
      auto [it, inserted] = providers.emplace(id, AgentDescriptor{id, provider_role(fm.layer()), std::nullopt, {}});
      it->second.owned_models.push_back(fm.model_id());
      model_owner_[fm.model_id()] = id;
    }
    for (auto& [id, desc] : providers) {
      provider_ids_.push_back(id);
      bus_.register_agent(std::move(desc));
    }
    std::size_t i = 0;
    while (i < s.events.size()) {
      std::size_t j = i;
      while (j < s.events.size() && s.events[j].tick == s.events[i].tick) ++j;
      ticks_.emplace_back(i, j);
      i = j;
    }
  }

  SimulationResult run() {
    CapabilityQuery query;
    for (const auto* list : {&deployment_.requirements.required, &deployment_.requirements.preferred}) {
      query.items.insert(query.items.end(), list->begin(), list->end());
    }
    for (const auto& p : provider_ids_) {
      post(Performative::Request, std::string(kManager), p, query, "capabilities");
    }
    std::size_t rounds = 0;
    while (bus_.has_pending() || consumer_can_send()) {
      if (++rounds > kMaxRounds) throw Error("simulation did not settle");
      for (const auto& id : bus_.agent_ids()) step(id);
    }
    if (!deployed_) throw Error("initial deployment did not complete");
    return SimulationResult{std::move(deployment_), std::move(state_), messages_, rounds};
  }

 private:
  static constexpr std::size_t kMaxRounds = 1000000;

  void post(Performative type, const std::string& from, const std::string& to, Content content,
            const std::string& conversation) {
    ++messages_;
    bus_.post(AclMessage{type, to, from, std::move(content), conversation});
  }

  bool consumer_can_send() const { return !consumer_waiting_ && next_tick_ < ticks_.size(); }

  void step(const std::string& id) {
    auto inbox = bus_.drain(id);
    if (id == consumer_id_) {
      consumer(inbox);
    } else if (id == kManager) {
      for (auto& msg : inbox) manager(msg);
    } else {
      for (auto& msg : inbox) provider(id, msg);
    }
  }

  void consumer(const std::vector<AclMessage>& inbox) {
    for (const auto& msg : inbox) {
      if (msg.message_type == Performative::Failure) {
        throw Error("consumer received FAILURE on " + msg.conversation_id);
      }
      if (msg.message_type == Performative::Agree) consumer_waiting_ = false;
    }
    while (consumer_can_send()) {
      auto [begin, end] = ticks_[next_tick_++];
      std::span<const ContextEvent> events(s_.events.data() + begin, end - begin);
      ContextSnapshot next = consumer_snapshot_;
      for (const auto& ev : preprocess_events(events)) next = apply_event(next, ev);
      auto changes = context_delta(consumer_snapshot_, next);
      consumer_snapshot_ = std::move(next);
      if (changes.empty()) continue;
      auto tick = events.front().tick;
      consumer_waiting_ = true;
      post(Performative::Inform, consumer_id_, std::string(kManager), ContextDelta{tick, std::move(changes)},
           "tick-" + std::to_string(tick));
    }
  }

  void manager(const AclMessage& msg) {
    if (const auto* reply = std::get_if<CapabilityReply>(&msg.content)) {
      for (const auto& m : reply->models) offered_.push_back(m.model_id);
      if (++replies_ == provider_ids_.size()) deploy();
      return;
    }
    if (const auto* delta = std::get_if<ContextDelta>(&msg.content)) {
      on_delta(*delta, msg.conversation_id);
      return;
    }
    if (!pending_) return;
    if (const auto* report = std::get_if<ReportContent>(&msg.content)) {
      finish(report->report, report->environment);
    } else if (msg.message_type == Performative::Refuse || msg.message_type == Performative::Failure) {
      finish(ExecutionReport{false, std::nullopt, std::nullopt}, {});
    }
  }

  void deploy() {
    const auto& model_id = deployment_.selection.configuration.model_id;
    if (std::find(offered_.begin(), offered_.end(), model_id) == offered_.end()) {
      throw Error("selected model " + model_id + " is not offered by any provider agent");
    }
    Configuration empty{model_id, {}, {}};
    AdaptationPlan plan{0,
                        ContextPredicate({Atom{"deployment", Comparator::Eq, Value(std::string("initial"))}}),
                        diff_actions(empty, deployment_.selection.configuration),
                        deployment_.selection.configuration,
                        deployment_.selection.provider_id,
                        deployment_.bundle,
                        PlanStatus::Reselected};
    pending_ = Pending{std::move(plan), ""};
    send_plan(SimEnvironment{deployment_.selection.provider_id, {}, {}}, "deployment");
  }

  void send_plan(SimEnvironment env, const std::string& conversation) {
    const auto& plan = pending_->plan;
    PlanContent content{plan.tick, plan.target_config.model_id, plan.actions, plan.target_config, plan.bundle,
                        std::move(env)};
    post(Performative::Request, std::string(kManager), model_owner_.at(plan.target_config.model_id),
         std::move(content), conversation);
  }

  void on_delta(const ContextDelta& delta, const std::string& conversation) {
    for (const auto& c : delta.changes) state_.snapshot = apply_event(state_.snapshot, {delta.tick, c.path, c.after});
    auto need = analyze_step(state_, delta.tick, delta.changes, s_.rules);
    if (!need) {
      ack(conversation, "no adaptation");
      return;
    }
    auto plan = plan_step(state_, *need, s_.rules, s_.catalog, deployment_.requirements, s_.consumer.objective);
    if (plan.status == PlanStatus::Rejected) {
      auto outcome = complete_execution(state_, plan, ExecutionReport{}, {});
      ack(conversation, std::string(to_string(outcome)));
      return;
    }
    SimEnvironment env = execution_environment(state_, plan);
    pending_ = Pending{std::move(plan), conversation};
    send_plan(std::move(env), conversation);
  }

  void finish(const ExecutionReport& report, SimEnvironment env) {
    Pending pending = std::move(*pending_);
    pending_.reset();
    if (!deployed_) {
      if (!report.ok) throw Error("initial deployment failed at `" + report.failed_command.value_or("") + "`");
      state_.current_config = pending.plan.target_config;
      state_.provider_id = pending.plan.provider_id;
      state_.environment = std::move(env);
      deployed_ = true;
      consumer_waiting_ = true;
      post(Performative::Agree, std::string(kManager), consumer_id_, Notice{"deployed"}, "deployment");
      return;
    }
    auto outcome = complete_execution(state_, pending.plan, report, std::move(env));
    ack(pending.consumer_conversation, std::string(to_string(outcome)));
  }

  void ack(const std::string& conversation, std::string text) {
    post(Performative::Agree, std::string(kManager), consumer_id_, Notice{std::move(text)}, conversation);
  }

  void provider(const std::string& id, const AclMessage& msg) {
    const auto& self = bus_.agent(id);
    if (const auto* query = std::get_if<CapabilityQuery>(&msg.content)) {
      post(Performative::Inform, id, msg.sender, provider_capabilities(self, s_.catalog, *query), msg.conversation_id);
      return;
    }
    const auto* plan = std::get_if<PlanContent>(&msg.content);
    if (plan == nullptr) return;
    if (std::find(self.owned_models.begin(), self.owned_models.end(), plan->model_id) == self.owned_models.end()) {
      post(Performative::Refuse, id, msg.sender, Notice{"model not owned: " + plan->model_id}, msg.conversation_id);
      return;
    }
    post(Performative::Agree, id, msg.sender, Notice{"executing"}, msg.conversation_id);
    SimEnvironment env = plan->environment;
    auto report = run_bundle(env, plan->bundle);
    post(Performative::Inform, id, msg.sender, ReportContent{plan->tick, report, std::move(env)}, msg.conversation_id);
  }

  const Scenario& s_;
  Deployment deployment_;
  MessageBus bus_;
  std::string consumer_id_;
  std::vector<std::string> provider_ids_;
  std::map<std::string, std::string> model_owner_;
  std::vector<std::pair<std::size_t, std::size_t>> ticks_;
  std::size_t next_tick_ = 0;
  bool consumer_waiting_ = true;
  ContextSnapshot consumer_snapshot_;
  LoopState state_;
  std::size_t replies_ = 0;
  std::vector<std::string> offered_;
  std::optional<Pending> pending_;
  bool deployed_ = false;
  std::size_t messages_ = 0;
};

}  // namespace

std::optional<SimulationResult> simulate(const Scenario& scenario, TraceLog trace, std::ostream* dump) {
  for (std::size_t i = 1; i < scenario.events.size(); ++i) {
    if (scenario.events[i].tick < scenario.events[i - 1].tick) throw OrderError("out_of_order: events are not sorted");
  }
  auto deployment = plan_deployment(scenario.goals, scenario.mapping, scenario.catalog, scenario.consumer.context,
                                    scenario.consumer.objective);
  if (!deployment) return std::nullopt;
  return Runtime(scenario, std::move(*deployment), std::move(trace), dump).run();
}

json summary_json(const SimulationResult& result) {
  json entries = json::array();
  for (const auto& e : result.state.trace.recorded()) entries.push_back(to_json(e));
  return json{{"requirements", to_json(result.deployment.requirements)},
              {"initial", to_json(result.deployment.selection)},
              {"final_config", to_json(result.state.current_config)},
              {"final_config_digest", config_digest(result.state.current_config)},
              {"provider_id", result.state.provider_id},
              {"environment", to_json(result.state.environment)},
              {"snapshot", to_json(result.state.snapshot)},
              {"trace", entries},
              {"messages", result.messages}};
}

}  // namespace dspl
