#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>
#include <json.hpp>

#include "dspl/configuration.hpp"
#include "dspl/feature_model.hpp"
#include "dspl/mapping.hpp"

namespace dspl {

using Rational = boost::rational<std::int64_t>;

/// Accepts "3", "-2", "3/4" and decimals such as "0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

/// Weighted scalarization: score = w_cost * cost - w_csl * csl * cost_scale.
struct Objective {
  Rational w_cost{1};
  Rational w_csl{1};
  std::string cost_attr = "cost";

  /// Throws Error unless both weights are non-negative with a positive sum.
  void check() const;
};

struct ScoredConfiguration {
  std::string provider_id;
  Configuration configuration;
  std::int64_t cost = 0;
  /// Fraction of applicable preferred requirements met; 1 when there are none.
  Rational csl{1};
  std::int64_t cost_scale = 1;
  Rational score{0};
};

nlohmann::json to_json(const ScoredConfiguration& scored);

/// Sum of the cost attribute over selected features: the binding when
/// present, otherwise the declared default, otherwise 0.
std::int64_t configuration_cost(const FeatureModel& fm, const Configuration& cfg, const std::string& cost_attr);
Rational customer_satisfaction(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req);
/// Largest attainable total cost: per feature the largest integer of the
/// cost attribute's domain (negatives count as 0), summed; at least 1.
std::int64_t cost_scale(const FeatureModel& fm, const std::string& cost_attr);
Rational score(const Objective& obj, std::int64_t cost, const Rational& csl, std::int64_t scale);

/// Every applicable required requirement is satisfied.
bool meets_requirements(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req);

/// Models offering every applicable required feature with a
/// domain-satisfiable attribute constraint, sorted by model id.
std::vector<std::string> match_providers(const RequirementSet& req, const std::vector<FeatureModel>& catalog);

/// First configuration found by propagation plus depth-first search over
/// features in name order. Optional features are tried deselected first;
/// members of an unfilled group are tried selected first. Attributes take
/// the smallest admissible value.
std::optional<Configuration> find_valid_configuration(const FeatureModel& fm, const RequirementSet& req);

/// Exact minimum of the objective over all valid configurations meeting
/// the required set. Ties go to the canonically smallest configuration.
std::optional<ScoredConfiguration> optimize_configuration(const FeatureModel& fm, const RequirementSet& req,
                                                          const Objective& obj);

/// optimize_configuration over every matched model; the lowest score wins,
/// ties go to the smaller model id.
std::optional<ScoredConfiguration> select_best(const RequirementSet& req, const std::vector<FeatureModel>& catalog,
                                               const Objective& obj);

}  // namespace dspl
