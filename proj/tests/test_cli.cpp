#include <doctest.h>

#include <sstream>

#include "dspl/cli.hpp"
#include "dspl/knowledge.hpp"
#include "support/oracle.hpp"

using namespace dspl;
using namespace dspl::testing;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = dispatch(args, out, err);
  return Run{code, out.str(), err.str()};
}

std::string data(const char* rel) { return data_path(rel).string(); }

std::vector<std::string> simulate_args(const std::string& trace, const char* rules = "glucose/rules.json",
                                       const char* events = "glucose/events.json") {
  return {"simulate",  "--catalog", data("glucose/catalog"), "--consumer", data("glucose/consumer.json"),
          "--goals",   data("glucose/goals.json"), "--mapping", data("glucose/mapping.json"),
          "--rules",   data(rules), "--events", data(events), "--trace", trace};
}

}  // namespace

TEST_CASE("validate exit codes") {
  auto ok = run({"validate", "--model", data("iaas_basic/model.json"), "--config", data("iaas_basic/config_valid.json")});
  CHECK(ok.code == kExitOk);
  CHECK(json::parse(ok.out)["violations"].empty());
  auto bad = run({"validate", "--model", data("iaas_basic/model.json"), "--config", data("iaas_basic/config_both_os.json")});
  CHECK(bad.code == kExitNegative);
  CHECK_FALSE(json::parse(bad.out)["violations"].empty());
  auto missing = run({"validate", "--model", "/nonexistent/model.json", "--config", data("iaas_basic/config_valid.json")});
  CHECK(missing.code == kExitError);
  CHECK(missing.err.find("/nonexistent/model.json") != std::string::npos);
}

TEST_CASE("enumerate") {
  auto r = run({"enumerate", "--model", data("iaas_basic/model.json")});
  CHECK(r.code == kExitOk);
  auto doc = json::parse(r.out);
  CHECK(doc["count"] == 4);
  CHECK(doc["truncated"] == false);
  auto limited = json::parse(run({"enumerate", "--model", data("iaas_basic/model.json"), "--limit", "2"}).out);
  CHECK(limited["configurations"].size() == 2);
  CHECK(limited["truncated"] == true);
}

TEST_CASE("select") {
  auto dir = scratch_dir("cli_select");
  auto r = run({"select", "--catalog", data("brokers/catalog"), "--requirements", data("brokers/requirements.json"),
                "--bundle-out", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(json::parse(r.out)["provider_id"] == "CloudA");
  CHECK(std::filesystem::exists(dir / "CloudA-IaaS.conf"));
  auto strong = run({"select", "--catalog", data("brokers/catalog"), "--requirements", data("brokers/requirements_strong.json")});
  CHECK(strong.code == kExitNegative);
  CHECK(strong.out.find("no match") != std::string::npos);
  auto weights = run({"select", "--catalog", data("brokers/catalog"), "--requirements", data("brokers/requirements.json"),
                      "--w-cost", "1/2", "--w-csl", "0.5"});
  CHECK(weights.code == kExitOk);
  auto bad_weight = run({"select", "--catalog", data("brokers/catalog"), "--requirements", data("brokers/requirements.json"),
                         "--w-cost", "abc"});
  CHECK(bad_weight.code == kExitError);
}

TEST_CASE("simulate and trace") {
  auto dir = scratch_dir("cli_sim");
  auto trace = (dir / "trace.ndjson").string();
  auto first = run(simulate_args(trace));
  CHECK(first.code == kExitOk);
  auto summary = json::parse(first.out);
  CHECK(summary["final_config"]["selected"].dump().find("SaveHistoricDoc") == std::string::npos);
  auto text = read_text_file(trace);
  auto second = run(simulate_args(trace));
  CHECK(second.out == first.out);
  CHECK(read_text_file(trace) == text);
  CHECK(parse_trace(text).size() == 1);

  auto q = run({"trace", "--log", trace, "--filter", "outcome == applied"});
  CHECK(q.code == kExitOk);
  CHECK(q.out == text);
  CHECK(run({"trace", "--log", trace, "--filter", "outcome == failed_execution"}).out.empty());
  CHECK(run({"trace", "--log", trace, "--filter", "outcome =="}).code == kExitError);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitError);
  CHECK(run({"frobnicate"}).code == kExitError);
  CHECK(run({"validate", "--model"}).code == kExitError);
  CHECK(run({"enumerate", "--model", data("iaas_basic/model.json"), "--bogus"}).code == kExitError);
  auto dir = scratch_dir("cli_bad");
  write_text_file(dir / "m.json", "{\"model_id\": 1}");
  auto bad = run({"enumerate", "--model", (dir / "m.json").string()});
  CHECK(bad.code == kExitError);
  CHECK(bad.err.find("m.json") != std::string::npos);
  CHECK(bad.err.find("/layer: missing required key") != std::string::npos);
}
