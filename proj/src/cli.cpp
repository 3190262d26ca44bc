#include "dspl/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <optional>

#include "dspl/configuration.hpp"
#include "dspl/derivation.hpp"
#include "dspl/error.hpp"
#include "dspl/knowledge.hpp"
#include "dspl/mape.hpp"
#include "dspl/selection.hpp"
#include "dspl/simulation.hpp"

namespace dspl {

using nlohmann::json;

namespace {

struct Options {
  std::string model;
  std::string config;
  std::size_t limit = 1000;
  std::string catalog;
  std::string requirements;
  std::string w_cost = "1";
  std::string w_csl = "1";
  std::string cost_attr = "cost";
  std::string bundle_out;
  std::string consumer;
  std::string goals;
  std::string mapping;
  std::string rules;
  std::string events;
  std::string trace;
  std::string dump_messages;
  std::string log;
  std::optional<std::string> filter;
};

void print(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

Rational flag_rational(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw Error(flag + ": " + e.what());
  }
}

int run_validate(const Options& o, std::ostream& out) {
  auto fm = parse_file(o.model, parse_feature_model);
  auto cfg = parse_file(o.config, parse_configuration);
  ValidationReport report;
  try {
    report = validate_configuration(fm, cfg);
  } catch (const Error& e) {
    throw FileError(o.config, e.what());
  }
  print(out, to_json(report));
  return report.valid() ? kExitOk : kExitNegative;
}

int run_enumerate(const Options& o, std::ostream& out) {
  if (o.limit == 0) throw Error("--limit must be positive");
  auto fm = parse_file(o.model, parse_feature_model);
  auto result = enumerate_configurations(fm, o.limit);
  json configs = json::array();
  for (const auto& c : result.configurations) configs.push_back(to_json(c));
  print(out, json{{"model_id", fm.model_id()},
                  {"count", result.configurations.size()},
                  {"truncated", result.truncated},
                  {"configurations", configs}});
  return kExitOk;
}

int run_select(const Options& o, std::ostream& out) {
  Objective obj{flag_rational("--w-cost", o.w_cost), flag_rational("--w-csl", o.w_csl), o.cost_attr};
  obj.check();
  auto catalog = load_catalog(o.catalog);
  auto req = parse_file(o.requirements, parse_requirements);
  auto best = select_best(req, catalog, obj);
  if (!best) {
    out << "no match\n";
    return kExitNegative;
  }
  auto bundle = derive_bundle(catalog_model(catalog, best->configuration.model_id), best->configuration);
  if (!o.bundle_out.empty()) write_bundle(o.bundle_out, best->configuration.model_id, bundle);
  json j = to_json(*best);
  j["candidates"] = match_providers(req, catalog);
  j["bundle"] = to_json(bundle);
  print(out, j);
  return kExitOk;
}

int run_simulate(const Options& o, std::ostream& out) {
  auto catalog = load_catalog(o.catalog);
  auto consumer = parse_file(o.consumer, parse_consumer);
  auto goals = parse_file(o.goals, parse_goal_model);
  auto mapping = parse_file(o.mapping, parse_mapping);
  auto rules = parse_file(o.rules, [&](std::string_view text) { return parse_rules(text, catalog); });
  auto events = parse_file(o.events, parse_events);
  Scenario scenario{std::move(catalog), std::move(consumer), std::move(goals),
                    std::move(mapping), std::move(rules),    std::move(events)};

  write_text_file(o.trace, "");
  auto log = TraceLog::open(o.trace);
  std::optional<std::ofstream> dump;
  if (!o.dump_messages.empty()) {
    dump.emplace(o.dump_messages, std::ios::binary | std::ios::trunc);
    if (!*dump) throw FileError(o.dump_messages, "cannot open for writing");
  }
  auto result = simulate(scenario, std::move(log), dump ? &*dump : nullptr);
  if (!result) {
    out << "no match\n";
    return kExitNegative;
  }
  if (dump) {
    dump->flush();
    if (!*dump) throw FileError(o.dump_messages, "write failed");
  }
  print(out, summary_json(*result));
  return kExitOk;
}

int run_trace(const Options& o, std::ostream& out) {
  std::optional<ContextPredicate> filter;
  if (o.filter) {
    try {
      filter = ContextPredicate::parse(*o.filter);
    } catch (const Error& e) {
      throw Error(std::string("--filter: ") + e.what());
    }
  }
  std::vector<TraceEntry> entries;
  try {
    entries = query_trace(o.log, filter);
  } catch (const TraceError& e) {
    throw FileError(o.log, e.what());
  }
  for (const auto& e : entries) out << trace_line(e) << '\n';
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-model configuration and self-adaptation engine", "dspl"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a configuration against a feature model");
  validate->add_option("--model", o.model, "Feature model file")->required();
  validate->add_option("--config", o.config, "Configuration file")->required();

  auto* enumerate = app.add_subcommand("enumerate", "List valid configurations in canonical order");
  enumerate->add_option("--model", o.model, "Feature model file")->required();
  enumerate->add_option("--limit", o.limit, "Maximum number of configurations");

  auto* select = app.add_subcommand("select", "Choose a provider and an optimal configuration");
  select->add_option("--catalog", o.catalog, "Directory of feature models")->required();
  select->add_option("--requirements", o.requirements, "Requirement set file")->required();
  select->add_option("--w-cost", o.w_cost, "Cost weight (rational)");
  select->add_option("--w-csl", o.w_csl, "Satisfaction weight (rational)");
  select->add_option("--cost-attr", o.cost_attr, "Cost attribute name");
  select->add_option("--bundle-out", o.bundle_out, "Directory for the .conf and .script files");

  auto* sim = app.add_subcommand("simulate", "Run the adaptation loop over an event stream");
  sim->add_option("--catalog", o.catalog, "Directory of feature models")->required();
  sim->add_option("--consumer", o.consumer, "Consumer profile file")->required();
  sim->add_option("--goals", o.goals, "Goal model file")->required();
  sim->add_option("--mapping", o.mapping, "Goal-to-feature mapping file")->required();
  sim->add_option("--rules", o.rules, "Adaptation rules file")->required();
  sim->add_option("--events", o.events, "Context event stream file")->required();
  sim->add_option("--trace", o.trace, "Trace log to write")->required();
  sim->add_option("--dump-messages", o.dump_messages, "Write delivered agent messages here");

  auto* trace = app.add_subcommand("trace", "Query a trace log");
  trace->add_option("--log", o.log, "Trace log file")->required();
  trace->add_option("--filter", o.filter, "Predicate over entry fields");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (validate->parsed()) return run_validate(o, out);
    if (enumerate->parsed()) return run_enumerate(o, out);
    if (select->parsed()) return run_select(o, out);
    if (sim->parsed()) return run_simulate(o, out);
    return run_trace(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace dspl
