#include "dspl/agents.hpp"

#include <algorithm>

#include "dspl/error.hpp"
#include "dspl/knowledge.hpp"

namespace dspl {

using nlohmann::json;

namespace {

constexpr Performative kPerformatives[] = {Performative::Request, Performative::Inform, Performative::Propose,
                                           Performative::Agree,   Performative::Refuse, Performative::Failure};

struct ContentJson {
  json operator()(const ContextDelta& d) const {
    json changes = json::array();
    for (const auto& c : d.changes) changes.push_back(to_json(c));
    return json{{"kind", "context_delta"}, {"tick", d.tick}, {"changes", changes}};
  }
  json operator()(const CapabilityQuery& q) const {
    json items = json::array();
    for (const auto& r : q.items) items.push_back(to_json(r));
    return json{{"kind", "capability_query"}, {"items", items}};
  }
  json operator()(const CapabilityReply& r) const {
    json models = json::array();
    for (const auto& m : r.models) {
      models.push_back(json{{"model_id", m.model_id}, {"digest", m.digest}, {"feature_names", m.feature_names}});
    }
    json items = json::array();
    for (const auto& i : r.items) {
      items.push_back(json{{"feature_name", i.feature_name}, {"provides", i.provides}, {"satisfiable", i.satisfiable}});
    }
    return json{{"kind", "capability_reply"}, {"models", models}, {"items", items}};
  }
  json operator()(const PlanContent& p) const {
    return json{{"kind", "plan"},
                {"tick", p.tick},
                {"model_id", p.model_id},
                {"actions", to_json(p.actions)},
                {"target_config", to_json(p.target_config)},
                {"bundle", to_json(p.bundle)},
                {"environment", to_json(p.environment)}};
  }
  json operator()(const ReportContent& r) const {
    return json{{"kind", "execution_report"}, {"tick", r.tick}, {"report", to_json(r.report)},
                {"environment", to_json(r.environment)}};
  }
  json operator()(const Notice& n) const { return json{{"kind", "notice"}, {"text", n.text}}; }
};

}  // namespace

std::string_view to_string(Performative p) {
  switch (p) {
    case Performative::Request:
      return "REQUEST";
    case Performative::Inform:
      return "INFORM";
    case Performative::Propose:
      return "PROPOSE";
    case Performative::Agree:
      return "AGREE";
    case Performative::Refuse:
      return "REFUSE";
    case Performative::Failure:
      return "FAILURE";
  }
  return "?";
}

std::optional<Performative> parse_performative(std::string_view text) {
  for (auto p : kPerformatives) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

json to_json(const Content& content) { return std::visit(ContentJson{}, content); }

json to_json(const AclMessage& msg) {
  return json{{"message_type", std::string(to_string(msg.message_type))},
              {"address_receiver", msg.receiver},
              {"address_sender", msg.sender},
              {"content", to_json(msg.content)},
              {"conversation_id", msg.conversation_id}};
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Consumer:
      return "Consumer";
    case Role::Manager:
      return "Manager";
    case Role::ProviderIaaS:
      return "ProviderIaaS";
    case Role::ProviderPaaS:
      return "ProviderPaaS";
    case Role::ProviderSaaS:
      return "ProviderSaaS";
  }
  return "?";
}

bool is_provider(Role role) { return role != Role::Consumer && role != Role::Manager; }

Role provider_role(Layer layer) {
  switch (layer) {
    case Layer::IaaS:
      return Role::ProviderIaaS;
    case Layer::PaaS:
      return Role::ProviderPaaS;
    case Layer::SaaS:
      return Role::ProviderSaaS;
  }
  return Role::ProviderIaaS;
}

void MessageBus::register_agent(AgentDescriptor agent) {
  if (agent.id.empty()) throw Error("agent id must not be empty");
  if (agents_.count(agent.id) != 0) throw Error("duplicate agent: " + agent.id);
  if (agent.role == Role::Manager && manager_) throw Error("second manager: " + agent.id);
  if (is_provider(agent.role) && agent.owned_models.empty()) throw Error("provider owns no model: " + agent.id);
  if (!is_provider(agent.role) && !agent.owned_models.empty()) {
    throw Error("only providers own models: " + agent.id);
  }
  if (agent.role == Role::Manager) manager_ = agent.id;
  order_.push_back(agent.id);
  inboxes_[agent.id];
  agents_.emplace(agent.id, std::move(agent));
}

const AgentDescriptor& MessageBus::agent(const std::string& id) const {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw LookupError("unknown agent: " + id);
  return it->second;
}

void MessageBus::deliver(AclMessage msg) {
  if (dump_ != nullptr) *dump_ << to_json(msg).dump() << '\n';
  inboxes_[msg.receiver].push_back(std::move(msg));
}

PostResult MessageBus::post(AclMessage msg) {
  if (msg.conversation_id.empty()) throw Error("empty conversation id");
  if (agents_.count(msg.sender) == 0) throw Error("unknown sender: " + msg.sender);
  if (agents_.count(msg.receiver) == 0) {
    AclMessage bounce{Performative::Failure, msg.sender, msg.receiver, Notice{"unknown receiver: " + msg.receiver},
                      msg.conversation_id};
    deliver(std::move(bounce));
    return PostResult::Bounced;
  }
  deliver(std::move(msg));
  return PostResult::Delivered;
}

std::vector<AclMessage> MessageBus::drain(const std::string& agent) {
  auto it = inboxes_.find(agent);
  if (it == inboxes_.end()) throw LookupError("unknown agent: " + agent);
  std::vector<AclMessage> out(std::make_move_iterator(it->second.begin()), std::make_move_iterator(it->second.end()));
  it->second.clear();
  return out;
}

bool MessageBus::has_pending() const {
  return std::any_of(inboxes_.begin(), inboxes_.end(), [](const auto& kv) { return !kv.second.empty(); });
}

CapabilityReply provider_capabilities(const AgentDescriptor& provider, const std::vector<FeatureModel>& catalog,
                                      const CapabilityQuery& query) {
  std::vector<const FeatureModel*> owned;
  for (const auto& id : provider.owned_models) owned.push_back(&catalog_model(catalog, id));
  std::sort(owned.begin(), owned.end(), [](const auto* a, const auto* b) { return a->model_id() < b->model_id(); });

  CapabilityReply reply;
  for (const auto* fm : owned) {
    OfferedModel offered{fm->model_id(), model_digest(*fm), {}};
    for (const auto& id : fm->ids_by_name()) offered.feature_names.push_back(fm->feature(id).name);
    reply.models.push_back(std::move(offered));
  }
  for (const auto& req : query.items) {
    CapabilityItem item{req.feature_name, false, false};
    for (const auto* fm : owned) {
      item.provides = item.provides || fm->find_by_name(req.feature_name) != nullptr;
      item.satisfiable = item.satisfiable || domain_satisfiable(*fm, req);
    }
    reply.items.push_back(std::move(item));
  }
  return reply;
}

}  // namespace dspl
