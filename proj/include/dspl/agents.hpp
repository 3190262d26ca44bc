#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspl/action.hpp"
#include "dspl/context.hpp"
#include "dspl/derivation.hpp"
#include "dspl/feature_model.hpp"
#include "dspl/goal_model.hpp"
#include "dspl/mapping.hpp"

namespace dspl {

enum class Performative { Request, Inform, Propose, Agree, Refuse, Failure };

std::string_view to_string(Performative p);
std::optional<Performative> parse_performative(std::string_view text);

struct ContextDelta {
  std::int64_t tick = 0;
  std::vector<ContextChange> changes;
  bool operator==(const ContextDelta&) const = default;
};

struct CapabilityQuery {
  std::vector<FeatureRequirement> items;
  bool operator==(const CapabilityQuery&) const = default;
};

struct OfferedModel {
  std::string model_id;
  std::string digest;
  std::vector<std::string> feature_names;
  bool operator==(const OfferedModel&) const = default;
};

struct CapabilityItem {
  std::string feature_name;
  /// Some owned model has a feature of this name.
  bool provides = false;
  /// Some owned model can meet the attribute constraint within its domain.
  bool satisfiable = false;
  bool operator==(const CapabilityItem&) const = default;
};

struct CapabilityReply {
  std::vector<OfferedModel> models;
  std::vector<CapabilityItem> items;
  bool operator==(const CapabilityReply&) const = default;
};

struct PlanContent {
  std::int64_t tick = 0;
  std::string model_id;
  std::vector<Action> actions;
  Configuration target_config;
  ConfigBundle bundle;
  /// State the effector starts from.
  SimEnvironment environment;
  bool operator==(const PlanContent&) const = default;
};

struct ReportContent {
  std::int64_t tick = 0;
  ExecutionReport report;
  /// State after the run (unchanged on failure).
  SimEnvironment environment;
  bool operator==(const ReportContent&) const = default;
};

/// Free-text reason carried by REFUSE and FAILURE.
struct Notice {
  std::string text;
  bool operator==(const Notice&) const = default;
};

using Content = std::variant<ContextDelta, CapabilityQuery, CapabilityReply, PlanContent, ReportContent, Notice>;

nlohmann::json to_json(const Content& content);

/// The five-column agent message: type, receiver, sender, content and
/// conversation id.
struct AclMessage {
  Performative message_type = Performative::Inform;
  std::string receiver;
  std::string sender;
  Content content;
  std::string conversation_id;

  bool operator==(const AclMessage&) const = default;
};

nlohmann::json to_json(const AclMessage& msg);

enum class Role { Consumer, Manager, ProviderIaaS, ProviderPaaS, ProviderSaaS };

std::string_view to_string(Role role);
bool is_provider(Role role);
Role provider_role(Layer layer);

struct AgentDescriptor {
  std::string id;
  Role role = Role::Consumer;
  std::optional<GoalModel> goal_model;
  std::vector<std::string> owned_models;
};

enum class PostResult { Delivered, Bounced };

/// Deterministic single-threaded mailbox system. Inboxes are FIFO, so
/// messages sharing sender, receiver and conversation keep post order.
class MessageBus {
 public:
  /// Throws Error on duplicate ids, a second manager, a provider owning
  /// no model, or a non-provider owning models.
  void register_agent(AgentDescriptor agent);

  /// Throws Error for an unregistered sender or an empty conversation id.
  /// An unknown receiver bounces a FAILURE to the sender on the same
  /// conversation.
  PostResult post(AclMessage msg);

  /// Returns and clears the inbox. Throws LookupError for unknown agents.
  std::vector<AclMessage> drain(const std::string& agent);

  bool has_pending() const;
  bool is_registered(const std::string& id) const { return agents_.count(id) != 0; }
  const AgentDescriptor& agent(const std::string& id) const;
  /// Ids in registration order.
  const std::vector<std::string>& agent_ids() const { return order_; }
  std::optional<std::string> manager() const { return manager_; }

  /// Every delivered message is also written as one JSON line.
  void set_dump(std::ostream* out) { dump_ = out; }

 private:
  void deliver(AclMessage msg);

  std::map<std::string, AgentDescriptor> agents_;
  std::vector<std::string> order_;
  std::map<std::string, std::deque<AclMessage>> inboxes_;
  std::optional<std::string> manager_;
  std::ostream* dump_ = nullptr;
};

/// Per requested item: whether an owned model has the feature, and whether
/// its attribute constraint is satisfiable within some owned domain.
CapabilityReply provider_capabilities(const AgentDescriptor& provider, const std::vector<FeatureModel>& catalog,
                                      const CapabilityQuery& query);

}  // namespace dspl
