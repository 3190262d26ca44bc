#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dspl/agents.hpp"
#include "dspl/cli.hpp"
#include "dspl/configuration.hpp"
#include "dspl/knowledge.hpp"
#include "dspl/mape.hpp"
#include "dspl/selection.hpp"
#include "support/loop_trial.hpp"
#include "support/oracle.hpp"

using namespace dspl;
using namespace dspl::testing;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = dispatch(args, out, err);
  return CliRun{code, out.str()};
}

std::string data(const char* rel) { return data_path(rel).string(); }

CliRun simulate_glucose(const std::string& trace) {
  return cli({"simulate", "--catalog", data("glucose/catalog"), "--consumer", data("glucose/consumer.json"), "--goals",
              data("glucose/goals.json"), "--mapping", data("glucose/mapping.json"), "--rules",
              data("glucose/rules.json"), "--events", data("glucose/events.json"), "--trace", trace});
}

Verdict enumerate_basic_model() {
  Verdict o;
  auto r = cli({"enumerate", "--model", data("iaas_basic/model.json")});
  o.require(r.code == 0, "enumerate exit code " + std::to_string(r.code));
  auto doc = json::parse(r.out);
  auto fm = parse_file(data_path("iaas_basic/model.json"), parse_feature_model);
  auto oracle = brute_force_configurations(fm);
  std::vector<Configuration> emitted;
  for (const auto& c : doc["configurations"]) emitted.push_back(configuration_from_json(c));
  o.require(emitted.size() == 4, "expected 4 configurations, got " + std::to_string(emitted.size()));
  o.require(emitted == oracle, "enumeration differs from the brute-force oracle");
  o.detail = o.pass ? "4 configurations, oracle order" : o.detail;
  return o;
}

Verdict glucose_scenario() {
  Verdict o;
  auto dir = scratch_dir("acceptance_glucose_scenario");
  auto first = simulate_glucose((dir / "a.ndjson").string());
  auto second = simulate_glucose((dir / "b.ndjson").string());
  o.require(first.code == 0 && second.code == 0, "simulate failed");
  auto summary = json::parse(first.out);
  auto catalog = load_catalog(data_path("glucose/catalog"));
  const auto& fm = catalog_model(catalog, "GlucoseMeasurement");
  auto initial = configuration_from_json(summary["initial"]["configuration"]);
  auto final_cfg = configuration_from_json(summary["final_config"]);
  o.require(initial.selected.count("SaveHistoricDoc") == 1, "initial configuration lacks SaveHistoricDoc");
  o.require(validate_configuration(fm, final_cfg).violations.empty(), "final configuration is invalid");
  o.require(final_cfg.selected.count("SaveHistoricDoc") == 0, "final configuration keeps SaveHistoricDoc");
  auto text = read_text_file(dir / "a.ndjson");
  auto entries = parse_trace(text);
  o.require(entries.size() == 1, "expected 1 trace entry, got " + std::to_string(entries.size()));
  if (entries.size() == 1) {
    o.require(entries[0].outcome == dspl::Outcome::Applied, "entry is not applied");
    o.require(entries[0].condition.str() == "device.battery == Low", "condition is " + entries[0].condition.str());
    o.require(entries[0].plan_actions == std::vector<Action>{Deselect{"SaveHistoricDoc"}}, "unexpected plan actions");
  }
  o.require(text == read_text_file(dir / "b.ndjson"), "traces differ between runs");
  if (o.pass) o.detail = "1 applied entry, identical traces";
  return o;
}

Verdict oracle_equivalence() {
  Verdict o;
  Rng rng(20240601);
  ModelParams params;
  params.max_features = 12;
  params.max_attributes = 2;
  params.max_constraints = 3;
  const int models = 250;
  int satisfiable = 0;
  for (int i = 0; i < models; ++i) {
    auto fm = random_model(rng, params);
    auto req = random_requirements(rng, fm);
    Objective obj{Rational(std::uniform_int_distribution<int>(0, 3)(rng)),
                  Rational(std::uniform_int_distribution<int>(1, 3)(rng)), "cost"};
    std::optional<Rational> best;
    for (const auto& cfg : brute_force_configurations(fm)) {
      if (!oracle_meets(fm, cfg, req)) continue;
      auto s = oracle_score(fm, cfg, req, obj);
      if (!best || s < *best) best = s;
    }
    auto found = find_valid_configuration(fm, req);
    auto optimized = optimize_configuration(fm, req, obj);
    o.require(found.has_value() == best.has_value(), "satisfiability disagrees on model " + std::to_string(i));
    o.require(optimized.has_value() == best.has_value(), "optimizer satisfiability disagrees on model " + std::to_string(i));
    if (best && optimized) {
      ++satisfiable;
      o.require(optimized->score == *best, "score differs on model " + std::to_string(i));
    }
  }
  if (o.pass) o.detail = std::to_string(models) + " models, " + std::to_string(satisfiable) + " satisfiable";
  return o;
}

Verdict provider_filtering() {
  Verdict o;
  const std::vector<std::pair<std::string, std::string>> weights{{"1", "1"}, {"1", "0"}, {"0", "1"}, {"5", "1/3"}, {"0.1", "7"}};
  for (const auto& [wc, wl] : weights) {
    auto r = cli({"select", "--catalog", data("brokers/catalog"), "--requirements", data("brokers/requirements.json"),
                  "--w-cost", wc, "--w-csl", wl});
    o.require(r.code == 0, "select failed for weights " + wc + "," + wl);
    if (r.code == 0) o.require(json::parse(r.out)["provider_id"] == "CloudA", "select returned " + r.out);
  }
  auto strong = cli({"select", "--catalog", data("brokers/catalog"), "--requirements", data("brokers/requirements_strong.json")});
  o.require(strong.code == 2, "strengthened requirements exit " + std::to_string(strong.code));
  if (o.pass) o.detail = "CloudA under 5 weightings, exit 2 when strengthened";
  return o;
}

std::vector<LoopTrial>& loop_trials() {
  static std::vector<LoopTrial> trials;
  return trials;
}

Verdict loop_safety() {
  Verdict o;
  std::size_t ticks = 0;
  std::size_t violations = 0;
  std::size_t entries = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    loop_trials().push_back(run_loop_trial(seed));
    ticks += loop_trials().back().ticks;
    violations += loop_trials().back().violations;
    entries += loop_trials().back().entries;
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.detail += "1000 trials, " + std::to_string(ticks) + " ticks, " + std::to_string(entries) + " trace entries, " +
              std::to_string(violations) + " violations";
  return o;
}

Verdict transactional_execution() {
  Verdict o;
  std::size_t injected = 0;
  std::size_t successes = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    std::optional<LoopScenario> s;
    for (std::uint64_t k = 0; !s; ++k) s = random_loop_scenario(seed * 7919 + k);
    auto state = initial_state(base_snapshot(), s->deployment, TraceLog::memory());
    std::size_t i = 0;
    while (i < s->events.size()) {
      std::size_t j = i;
      while (j < s->events.size() && s->events[j].tick == s->events[i].tick) ++j;
      std::span<const ContextEvent> batch(s->events.data() + i, j - i);
      auto tick = s->events[i].tick;
      i = j;
      auto delta = monitor_step(state, batch);
      auto need = analyze_step(state, tick, delta, s->rules);
      if (!need) continue;
      auto plan = plan_step(state, *need, s->rules, s->catalog, s->requirements, s->objective);
      if (plan.status != PlanStatus::Rejected) {
        auto broken = plan;
        broken.bundle.script.push_back(ResolvedCommand{"probe", {"x"}, std::string("absent.key")});
        auto env_before = to_json(state.environment).dump();
        auto cfg_before = state.current_config;
        auto outcome = execute_step(state, broken);
        ++injected;
        o.require(outcome == dspl::Outcome::FailedExecution, "injected failure not reported");
        o.require(to_json(state.environment).dump() == env_before, "environment changed after injected failure");
        o.require(state.current_config == cfg_before, "configuration changed after injected failure");
        o.require(state.trace.recorded().back().outcome == dspl::Outcome::FailedExecution, "trace outcome mismatch");
      }
      if (execute_step(state, plan) == dspl::Outcome::Applied) {
        ++successes;
        o.require(verify_environment(state.environment, plan.bundle), "verify_environment false after success");
      }
    }
  }
  o.require(injected > 0 && successes > 0, "no plans exercised");
  if (o.pass) o.detail = std::to_string(injected) + " injected failures, " + std::to_string(successes) + " verified successes";
  return o;
}

Verdict replay() {
  Verdict o;
  auto dir = scratch_dir("acceptance_replay");
  auto r = simulate_glucose((dir / "trace.ndjson").string());
  auto summary = json::parse(r.out);
  auto entries = query_trace(dir / "trace.ndjson");
  auto initial = configuration_from_json(summary["initial"]["configuration"]);
  auto replayed = config_digest(replay_trace(initial, entries));
  o.require(!entries.empty() && replayed == entries.back().post_config_digest, "glucose scenario replay mismatch");
  o.require(replayed == summary["final_config_digest"], "glucose scenario final digest mismatch");
  std::size_t checked = 0;
  for (const auto& t : loop_trials()) {
    ++checked;
    o.require(t.replay_digest == t.final_digest, "randomized replay mismatch in trial " + std::to_string(checked));
  }
  o.require(checked == 1000, "loop trials missing");
  if (o.pass) o.detail = "glucose scenario + " + std::to_string(checked) + " randomized runs";
  return o;
}

struct BusRun {
  std::vector<std::vector<AclMessage>> drains;
  std::size_t posted = 0;
  std::size_t bounced = 0;
};

BusRun bus_run(std::uint64_t seed) {
  Rng rng(seed);
  MessageBus bus;
  std::vector<std::string> ids;
  int agents = std::uniform_int_distribution<int>(1, 10)(rng);
  for (int i = 0; i < agents; ++i) {
    ids.push_back("agent" + std::to_string(i));
    bus.register_agent(AgentDescriptor{ids.back(), i == 0 ? Role::Manager : Role::Consumer, std::nullopt, {}});
  }
  BusRun run;
  std::uniform_int_distribution<std::size_t> who(0, ids.size() - 1);
  int messages = std::uniform_int_distribution<int>(1, 1000)(rng);
  for (int m = 0; m < messages; ++m) {
    bool ghost = std::bernoulli_distribution(0.05)(rng);
    std::string conv = ghost ? "g" + std::to_string(m) : "c" + std::to_string(m % 4);
    AclMessage msg{Performative::Inform, ghost ? "ghost" : ids[who(rng)], ids[who(rng)], Notice{std::to_string(m)}, conv};
    run.bounced += bus.post(std::move(msg)) == PostResult::Bounced;
    ++run.posted;
    if (std::bernoulli_distribution(0.1)(rng)) run.drains.push_back(bus.drain(ids[who(rng)]));
  }
  for (const auto& id : ids) run.drains.push_back(bus.drain(id));
  return run;
}

Verdict bus_properties() {
  Verdict o;
  std::size_t total = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto run = bus_run(seed);
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
        const auto& text = std::get<Notice>(msg.content).text;
        ++seen[text];
        auto key = std::make_tuple(msg.sender, msg.receiver, msg.conversation_id);
        auto it = last.find(key);
        o.require(it == last.end() || it->second < std::stoi(text), "FIFO violated in run " + std::to_string(seed));
        last[key] = std::stoi(text);
      }
    }
    std::size_t drained = 0;
    for (const auto& [k, n] : seen) {
      o.require(n == 1, "message seen " + std::to_string(n) + " times in run " + std::to_string(seed));
      drained += static_cast<std::size_t>(n);
    }
    o.require(drained == run.posted, "messages lost in run " + std::to_string(seed));
    o.require(failures == run.bounced, "bounce count mismatch in run " + std::to_string(seed));
    o.require(bus_run(seed).drains == run.drains, "replay differs in run " + std::to_string(seed));
    total += run.posted;
  }
  if (o.pass) o.detail = "200 runs, " + std::to_string(total) + " messages";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {1, "basic IaaS model enumeration", enumerate_basic_model, 1.0},
      {2, "glucose scenario end to end", glucose_scenario, 1.0},
      {3, "solver oracle equivalence", oracle_equivalence, 60.0},
      {4, "provider filtering", provider_filtering, 0.0},
      {5, "loop safety", loop_safety, 0.0},
      {6, "transactional execution", transactional_execution, 0.0},
      {7, "trace replay", replay, 0.0},
      {8, "bus conservation and FIFO", bus_properties, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && seconds >= c.budget_s) {
      o.pass = false;
      o.detail += " (over the " + std::to_string(c.budget_s) + " s budget)";
    }
    failed += !o.pass;
    std::printf("%s criterion %d: %s [%.3f s] %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
