#include "dspl/derivation.hpp"

#include <algorithm>
#include <cctype>

#include "dspl/digest.hpp"
#include "dspl/error.hpp"
#include "dspl/knowledge.hpp"
#include "json_util.hpp"
#include "placeholder.hpp"

namespace dspl {

using nlohmann::json;

std::string ResolvedCommand::text() const {
  std::string out = verb;
  for (const auto& a : args) out += " " + a;
  return out;
}

std::string ConfigBundle::conf_text() const {
  std::string out;
  for (const auto& [key, value] : entries) out += key + "=" + value + "\n";
  return out;
}

std::string ConfigBundle::script_text() const {
  std::string out;
  for (const auto& cmd : script) out += cmd.text() + "\n";
  return out;
}

namespace {

json command_json(const ResolvedCommand& cmd) {
  json out{{"verb", cmd.verb}, {"args", cmd.args}};
  out["precondition"] = cmd.precondition ? json(*cmd.precondition) : json(nullptr);
  return out;
}

json bundle_body(const ConfigBundle& bundle) {
  json script = json::array();
  for (const auto& cmd : bundle.script) script.push_back(command_json(cmd));
  return json{{"entries", bundle.entries}, {"script", script}};
}

bool has_space(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

void check_token(const std::string& token, const std::string& feature, const char* what) {
  if (token.empty() || has_space(token)) {
    throw DerivationError("feature " + feature + ": " + what + " `" + token + "` is empty or contains whitespace");
  }
}

}  // namespace

json to_json(const ConfigBundle& bundle) {
  json out = bundle_body(bundle);
  out["digest"] = bundle.digest;
  return out;
}

ConfigBundle derive_bundle(const FeatureModel& fm, const Configuration& cfg) {
  ConfigBundle bundle;
  std::vector<std::string> stack{fm.root()};
  while (!stack.empty()) {
    std::string id = stack.back();
    stack.pop_back();
    if (!cfg.is_selected(id)) continue;
    const Feature& f = fm.feature(id);
    auto lookup = [&](const std::string& attr) -> std::string {
      if (f.attributes.count(attr) == 0) {
        throw DerivationError("feature " + f.name + ": placeholder ${" + attr + "} names no declared attribute");
      }
      auto it = cfg.bindings.find({id, attr});
      if (it == cfg.bindings.end()) {
        throw DerivationError("feature " + f.name + ": placeholder ${" + attr + "} is unbound");
      }
      return to_string(it->second);
    };
    for (const auto& tmpl : f.artifact_templates) {
      if (const auto* entry = std::get_if<ConfigEntryTemplate>(&tmpl)) {
        auto key = detail::substitute(entry->key, lookup);
        auto value = detail::substitute(entry->value, lookup);
        check_token(key, f.name, "config key");
        if (key.find('=') != std::string::npos || value.find('\n') != std::string::npos) {
          throw DerivationError("feature " + f.name + ": entry `" + key + "` cannot be written as key=value");
        }
        auto [it, inserted] = bundle.entries.emplace(key, value);
        if (!inserted && it->second != value) {
          throw DerivationError("feature " + f.name + ": key " + key + " rendered as both `" + it->second +
                                "` and `" + value + "`");
        }
      } else {
        const auto& cmd = std::get<CommandTemplate>(tmpl);
        ResolvedCommand resolved{detail::substitute(cmd.verb, lookup), {}, std::nullopt};
        check_token(resolved.verb, f.name, "command verb");
        for (const auto& arg : cmd.args) {
          resolved.args.push_back(detail::substitute(arg, lookup));
          check_token(resolved.args.back(), f.name, "command argument");
        }
        if (cmd.precondition) resolved.precondition = detail::substitute(*cmd.precondition, lookup);
        bundle.script.push_back(std::move(resolved));
      }
    }
    const auto& kids = fm.children(id);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  bundle.digest = sha256_hex(bundle_body(bundle).dump());
  return bundle;
}

json to_json(const SimEnvironment& env) {
  return json{{"provider_id", env.provider_id}, {"applied", env.applied}, {"command_log", env.command_log}};
}

json to_json(const ExecutionReport& report) {
  json out{{"ok", report.ok}};
  out["failed_index"] = report.failed_index ? json(*report.failed_index) : json(nullptr);
  out["failed_command"] = report.failed_command ? json(*report.failed_command) : json(nullptr);
  return out;
}

ExecutionReport execution_report_from_json(const json& j, const std::string& where) {
  detail::Fields f(j, where, {"ok", "failed_index", "failed_command"});
  ExecutionReport report;
  report.ok = f.boolean("ok", true);
  if (f.optional("failed_index")) report.failed_index = static_cast<std::size_t>(f.integer("failed_index"));
  report.failed_command = f.optional_string("failed_command");
  return report;
}

ExecutionReport run_bundle(SimEnvironment& env, const ConfigBundle& bundle) {
  SimEnvironment before = env;
  for (const auto& [key, value] : bundle.entries) env.applied[key] = value;
  for (std::size_t i = 0; i < bundle.script.size(); ++i) {
    const auto& cmd = bundle.script[i];
    if (cmd.precondition && env.applied.count(*cmd.precondition) == 0) {
      env = std::move(before);
      return ExecutionReport{false, i, cmd.text()};
    }
    env.command_log.push_back(cmd.text());
  }
  return ExecutionReport{};
}

bool verify_environment(const SimEnvironment& env, const ConfigBundle& bundle) {
  return std::all_of(bundle.entries.begin(), bundle.entries.end(), [&](const auto& kv) {
    auto it = env.applied.find(kv.first);
    return it != env.applied.end() && it->second == kv.second;
  });
}

void write_bundle(const std::filesystem::path& dir, const std::string& name, const ConfigBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FileError(dir.string(), "cannot create directory");
  write_text_file(dir / (name + ".conf"), bundle.conf_text());
  write_text_file(dir / (name + ".script"), bundle.script_text());
}

}  // namespace dspl
