#include <doctest.h>

#include <sstream>

#include "dspl/agents.hpp"
#include "dspl/error.hpp"
#include "dspl/knowledge.hpp"
#include "support/oracle.hpp"

using namespace dspl;
using namespace dspl::testing;

namespace {

MessageBus small_bus() {
  MessageBus bus;
  bus.register_agent(AgentDescriptor{"consumer:p1", Role::Consumer, std::nullopt, {}});
  bus.register_agent(AgentDescriptor{"manager", Role::Manager, std::nullopt, {}});
  bus.register_agent(AgentDescriptor{"provider:CloudA:IaaS", Role::ProviderIaaS, std::nullopt, {"CloudA-IaaS"}});
  return bus;
}

AclMessage note(std::string from, std::string to, std::string conv, std::string text) {
  return AclMessage{Performative::Inform, std::move(to), std::move(from), Notice{std::move(text)}, std::move(conv)};
}

FeatureRequirement ram_at_least(std::int64_t gb) {
  return FeatureRequirement{"VM", std::nullopt, AttrConstraint{"ram_gb", Comparator::Ge, Value(gb)}};
}

}  // namespace

TEST_CASE("posting and draining") {
  auto bus = small_bus();
  ContextDelta delta{5, {ContextChange{"device.battery", Value(std::string("Normal")), Value(std::string("Low"))}}};
  CHECK(bus.post(AclMessage{Performative::Inform, "manager", "consumer:p1", delta, "c1"}) == PostResult::Delivered);
  auto inbox = bus.drain("manager");
  REQUIRE(inbox.size() == 1);
  CHECK(std::get<ContextDelta>(inbox[0].content) == delta);
  CHECK(bus.drain("manager").empty());

  CHECK(bus.post(note("consumer:p1", "ghost", "c9", "hello")) == PostResult::Bounced);
  auto bounced = bus.drain("consumer:p1");
  REQUIRE(bounced.size() == 1);
  CHECK(bounced[0].message_type == Performative::Failure);
  CHECK(bounced[0].conversation_id == "c9");
  CHECK(bounced[0].sender == "ghost");

  for (int i = 0; i < 3; ++i) bus.post(note("consumer:p1", "manager", "c1", std::to_string(i)));
  auto three = bus.drain("manager");
  REQUIRE(three.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(std::get<Notice>(three[static_cast<std::size_t>(i)].content).text == std::to_string(i));

  CHECK_THROWS_AS(bus.post(note("ghost", "manager", "c1", "x")), Error);
  CHECK_THROWS_AS(bus.post(note("manager", "consumer:p1", "", "x")), Error);
  CHECK_THROWS_AS(bus.drain("ghost"), LookupError);
  CHECK_FALSE(bus.has_pending());
}

TEST_CASE("registration invariants") {
  auto bus = small_bus();
  CHECK_THROWS_AS(bus.register_agent(AgentDescriptor{"manager", Role::Consumer, std::nullopt, {}}), Error);
  CHECK_THROWS_AS(bus.register_agent(AgentDescriptor{"m2", Role::Manager, std::nullopt, {}}), Error);
  CHECK_THROWS_AS(bus.register_agent(AgentDescriptor{"p", Role::ProviderSaaS, std::nullopt, {}}), Error);
  CHECK_THROWS_AS(bus.register_agent(AgentDescriptor{"c", Role::Consumer, std::nullopt, {"CloudA-IaaS"}}), Error);
  CHECK(bus.agent_ids() == std::vector<std::string>{"consumer:p1", "manager", "provider:CloudA:IaaS"});
  CHECK(bus.manager() == std::optional<std::string>("manager"));
}

TEST_CASE("message dump uses the five column names") {
  auto bus = small_bus();
  std::ostringstream dump;
  bus.set_dump(&dump);
  bus.post(note("manager", "consumer:p1", "c2", "deployed"));
  auto line = nlohmann::json::parse(dump.str());
  CHECK(line["message_type"] == "INFORM");
  CHECK(line["address_receiver"] == "consumer:p1");
  CHECK(line["address_sender"] == "manager");
  CHECK(line["conversation_id"] == "c2");
  CHECK(line["content"]["kind"].is_string());
}

TEST_CASE("provider capabilities") {
  auto catalog = load_catalog(data_path("brokers/catalog"));
  AgentDescriptor a{"provider:CloudA:IaaS", Role::ProviderIaaS, std::nullopt, {"CloudA-IaaS"}};
  AgentDescriptor b{"provider:CloudB:IaaS", Role::ProviderIaaS, std::nullopt, {"CloudB-IaaS"}};
  CapabilityQuery q{{FeatureRequirement{"MySQL", std::nullopt, std::nullopt}, ram_at_least(3)}};
  auto ra = provider_capabilities(a, catalog, q);
  REQUIRE(ra.items.size() == 2);
  CHECK(ra.items[0] == CapabilityItem{"MySQL", true, true});
  CHECK(ra.items[1] == CapabilityItem{"VM", true, true});
  REQUIRE(ra.models.size() == 1);
  CHECK(ra.models[0].digest == model_digest(catalog[0]));
  auto rb = provider_capabilities(b, catalog, q);
  CHECK(rb.items[0] == CapabilityItem{"MySQL", false, false});
  CHECK(rb.items[1] == CapabilityItem{"VM", true, false});
}

TEST_CASE("provides matches a linear scan of owned models") {
  Rng rng(4);
  ModelParams params;
  params.max_features = 8;
  std::vector<FeatureModel> catalog;
  for (int m = 0; m < 4; ++m) {
    params.model_id = "M" + std::to_string(m);
    catalog.push_back(random_model(rng, params));
  }
  for (int trial = 0; trial < 100; ++trial) {
    AgentDescriptor p{"provider:P:IaaS", Role::ProviderIaaS, std::nullopt, {}};
    for (const auto& fm : catalog) {
      if (std::bernoulli_distribution(0.5)(rng)) p.owned_models.push_back(fm.model_id());
    }
    CapabilityQuery q;
    for (char c = 'A'; c <= 'L'; ++c) q.items.push_back(FeatureRequirement{std::string(1, c), std::nullopt, std::nullopt});
    auto reply = provider_capabilities(p, catalog, q);
    REQUIRE(reply.items.size() == q.items.size());
    for (std::size_t i = 0; i < q.items.size(); ++i) {
      bool expected = false;
      for (const auto& id : p.owned_models) {
        for (const auto& [fid, f] : catalog_model(catalog, id).features()) expected = expected || f.name == q.items[i].feature_name;
      }
      CHECK(reply.items[i].provides == expected);
    }
  }
}

namespace {

struct BusRun {
  std::vector<std::vector<AclMessage>> drains;
  std::size_t posted = 0;
  std::size_t bounced = 0;
};

BusRun random_bus_run(std::uint64_t seed) {
  Rng rng(seed);
  MessageBus bus;
  int agents = std::uniform_int_distribution<int>(2, 10)(rng);
  std::vector<std::string> ids;
  for (int i = 0; i < agents; ++i) {
    ids.push_back("a" + std::to_string(i));
    bus.register_agent(AgentDescriptor{ids.back(), i == 0 ? Role::Manager : Role::Consumer, std::nullopt, {}});
  }
  BusRun run;
  int messages = std::uniform_int_distribution<int>(1, 1000)(rng);
  std::uniform_int_distribution<std::size_t> who(0, ids.size() - 1);
  for (int m = 0; m < messages; ++m) {
    std::string to = std::bernoulli_distribution(0.05)(rng) ? "ghost" : ids[who(rng)];
    std::string conv = to == "ghost" ? "g" + std::to_string(m) : "c" + std::to_string(m % 3);
    auto result = bus.post(note(ids[who(rng)], to, conv, std::to_string(m)));
    ++run.posted;
    run.bounced += result == PostResult::Bounced;
    if (std::bernoulli_distribution(0.1)(rng)) run.drains.push_back(bus.drain(ids[who(rng)]));
  }
  for (const auto& id : ids) run.drains.push_back(bus.drain(id));
  return run;
}

}  // namespace

TEST_CASE("bus conservation, FIFO and replay equality") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto run = random_bus_run(seed);
    std::map<std::string, int> seen;
    std::map<std::tuple<std::string, std::string, std::string>, int> last;
    std::size_t failures = 0;
    for (const auto& batch : run.drains) {
      for (const auto& msg : batch) {
        if (msg.message_type == Performative::Failure) {
          ++failures;
          ++seen[msg.conversation_id];
          continue;
        }
        ++seen[std::get<Notice>(msg.content).text];
        int n = std::stoi(std::get<Notice>(msg.content).text);
        auto key = std::make_tuple(msg.sender, msg.receiver, msg.conversation_id);
        auto it = last.find(key);
        if (it != last.end()) CHECK(it->second < n);
        last[key] = n;
      }
    }
    CHECK(failures == run.bounced);
    std::size_t total = 0;
    for (const auto& [text, count] : seen) {
      total += static_cast<std::size_t>(count);
      CHECK(count == 1);
    }
    CHECK(total == run.posted);

    auto again = random_bus_run(seed);
    CHECK(again.drains == run.drains);
  }
}
