#include <doctest.h>

#include <algorithm>

#include "dspl/configuration.hpp"
#include "dspl/error.hpp"
#include "dspl/knowledge.hpp"
#include "dspl/selection.hpp"
#include "support/oracle.hpp"

using namespace dspl;
using namespace dspl::testing;
using nlohmann::json;

namespace {

FeatureRequirement named(std::string name) { return FeatureRequirement{std::move(name), std::nullopt, std::nullopt}; }

FeatureModel basic_model() { return parse_file(data_path("iaas_basic/model.json"), parse_feature_model); }

FeatureModel basic_with_ide_cost() {
  json doc = json::parse(read_text_file(data_path("iaas_basic/model.json")));
  for (auto& f : doc["features"]) {
    if (f["id"] == "IDE") f["attributes"] = json::array({{{"name", "cost"}, {"domain", {{"enum", {5}}}}, {"default", 5}}});
  }
  return feature_model_from_json(doc);
}

Objective weights(std::int64_t cost, std::int64_t csl) { return Objective{Rational(cost), Rational(csl), "cost"}; }

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(to_string(Rational(6, 8)) == "3/4");
  for (const char* bad : {"", "x", "1/0", "1.", "1/2/3", "0.-5"}) CHECK_THROWS_AS(parse_rational(bad), Error);
  CHECK_THROWS_AS(weights(0, 0).check(), Error);
  CHECK_THROWS_AS(weights(-1, 2).check(), Error);
}

TEST_CASE("match_providers") {
  auto catalog = load_catalog(data_path("brokers/catalog"));
  auto req = parse_file(data_path("brokers/requirements.json"), parse_requirements);
  CHECK(match_providers(req, catalog) == std::vector<std::string>{"CloudA-IaaS"});
  CHECK(match_providers(RequirementSet{}, catalog) == std::vector<std::string>{"CloudA-IaaS", "CloudB-IaaS"});
  CHECK(match_providers(RequirementSet{{named("Oracle")}, {}}, catalog).empty());
  RequirementSet preferred_only{{}, {named("MySQL")}};
  CHECK(match_providers(preferred_only, catalog).size() == 2);
  RequirementSet scoped{{FeatureRequirement{"MySQL", std::string("CloudA"), std::nullopt}}, {}};
  CHECK(match_providers(scoped, catalog).size() == 2);
}

TEST_CASE("find_valid_configuration examples") {
  auto fm = basic_model();
  auto linux_only = find_valid_configuration(fm, RequirementSet{{named("Linux")}, {}});
  REQUIRE(linux_only.has_value());
  CHECK(linux_only->selected == std::set<std::string>{"IaaS", "OS", "Linux"});
  CHECK_FALSE(find_valid_configuration(fm, RequirementSet{{named("Linux"), named("Windows")}, {}}).has_value());
  auto minimal = find_valid_configuration(fm, RequirementSet{});
  REQUIRE(minimal.has_value());
  CHECK(minimal->selected.count("IDE") == 0);
  CHECK(validate_configuration(fm, *minimal).violations.empty());
}

TEST_CASE("optimize_configuration examples") {
  auto fm = basic_with_ide_cost();
  auto cheap = optimize_configuration(fm, RequirementSet{{named("Linux")}, {}}, weights(1, 0));
  REQUIRE(cheap.has_value());
  CHECK(cheap->configuration.selected.count("IDE") == 0);
  CHECK(cheap->cost == 0);

  auto happy = optimize_configuration(fm, RequirementSet{{named("Linux")}, {named("IDE")}}, weights(0, 1));
  REQUIRE(happy.has_value());
  CHECK(happy->configuration.selected.count("IDE") == 1);
  CHECK(happy->csl == Rational(1));
  CHECK(happy->cost_scale == 5);
  CHECK(happy->score == Rational(-5));

  CHECK_FALSE(optimize_configuration(fm, RequirementSet{{named("Linux"), named("Windows")}, {}}, weights(1, 1)));
  CHECK_FALSE(optimize_configuration(fm, RequirementSet{{named("Ghost")}, {}}, weights(1, 1)));

  auto j = to_json(*happy);
  CHECK(j["score"] == "-5");
  CHECK(j["model_id"] == fm.model_id());
}

TEST_CASE("select_best on the broker catalog") {
  auto catalog = load_catalog(data_path("brokers/catalog"));
  auto req = parse_file(data_path("brokers/requirements.json"), parse_requirements);
  auto best = select_best(req, catalog, weights(1, 1));
  REQUIRE(best.has_value());
  CHECK(best->provider_id == "CloudA");
  CHECK(best->configuration.selected.count("a_mysql") == 1);
  CHECK(best->configuration.selected.count("a_linux") == 1);
  CHECK(best->configuration.bindings.at({"a_vm", "ram_gb"}) == Value(std::int64_t{4}));
  auto strong = parse_file(data_path("brokers/requirements_strong.json"), parse_requirements);
  CHECK_FALSE(select_best(strong, catalog, weights(1, 1)).has_value());
}

TEST_CASE("completeness, soundness and optimality against brute force") {
  Rng rng(77);
  ModelParams params;
  params.max_features = 8;
  int satisfiable = 0;
  for (int trial = 0; trial < 250; ++trial) {
    auto fm = random_model(rng, params);
    auto req = random_requirements(rng, fm);
    Objective obj{Rational(std::uniform_int_distribution<int>(0, 3)(rng)), Rational(std::uniform_int_distribution<int>(1, 3)(rng)), "cost"};
    auto all = brute_force_configurations(fm);
    std::optional<Rational> oracle_best;
    for (const auto& cfg : all) {
      if (!oracle_meets(fm, cfg, req)) continue;
      auto s = oracle_score(fm, cfg, req, obj);
      if (!oracle_best || s < *oracle_best) oracle_best = s;
    }
    auto found = find_valid_configuration(fm, req);
    auto best = optimize_configuration(fm, req, obj);
    CHECK(found.has_value() == oracle_best.has_value());
    CHECK(best.has_value() == oracle_best.has_value());
    if (!oracle_best || !found || !best) continue;
    ++satisfiable;
    CHECK(validate_configuration(fm, *found).violations.empty());
    CHECK(oracle_meets(fm, *found, req));
    CHECK(validate_configuration(fm, best->configuration).violations.empty());
    CHECK(oracle_meets(fm, best->configuration, req));
    CHECK(best->score == *oracle_best);
    CHECK(best->score == oracle_score(fm, best->configuration, req, obj));

    Objective scaled{obj.w_cost * Rational(7, 3), obj.w_csl * Rational(7, 3), "cost"};
    auto again = optimize_configuration(fm, req, scaled);
    REQUIRE(again.has_value());
    CHECK(again->configuration == best->configuration);
  }
  CHECK(satisfiable > 50);
}

TEST_CASE("match_providers is anti-monotone") {
  Rng rng(8);
  ModelParams params;
  params.max_features = 6;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FeatureModel> catalog;
    for (int m = 0; m < 3; ++m) {
      params.model_id = "M" + std::to_string(m);
      params.provider_id = "P" + std::to_string(m % 2);
      catalog.push_back(random_model(rng, params));
    }
    auto req = random_requirements(rng, catalog[0]);
    auto extra = random_requirements(rng, catalog[1]);
    auto more = req;
    for (const auto& r : extra.required) more.required.push_back(r);
    auto base = match_providers(req, catalog);
    for (const auto& id : match_providers(more, catalog)) CHECK(std::count(base.begin(), base.end(), id) == 1);
  }
}
