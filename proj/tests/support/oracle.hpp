#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dspl/configuration.hpp"
#include "dspl/context.hpp"
#include "dspl/feature_model.hpp"
#include "dspl/mape.hpp"
#include "dspl/mapping.hpp"
#include "dspl/selection.hpp"

namespace dspl::testing {

using Rng = std::mt19937_64;

struct ModelParams {
  int max_features = 12;
  int max_attributes = 2;
  int max_constraints = 3;
  double dynamic_probability = 0.5;
  bool templates = false;
  std::string model_id = "M";
  std::string provider_id = "P";
  Layer layer = Layer::IaaS;
};

FeatureModel random_model(Rng& rng, const ModelParams& params);

/// Every subset of features times every binding of the selected features'
/// attributes, kept when validate_configuration reports nothing. Sorted
/// by (selected names, bindings keyed by feature name).
std::vector<Configuration> brute_force_configurations(const FeatureModel& fm);

/// Ordering key used by the brute-force oracle.
std::pair<std::vector<std::string>, std::vector<std::pair<std::pair<std::string, std::string>, Value>>> order_key(
    const FeatureModel& fm, const Configuration& cfg);

bool oracle_applies(const FeatureModel& fm, const FeatureRequirement& req);
bool oracle_satisfies(const FeatureModel& fm, const Configuration& cfg, const FeatureRequirement& req);
bool oracle_meets(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req);
Rational oracle_score(const FeatureModel& fm, const Configuration& cfg, const RequirementSet& req,
                      const Objective& obj);

RequirementSet random_requirements(Rng& rng, const FeatureModel& fm);
std::vector<AdaptationRule> random_rules(Rng& rng, const FeatureModel& fm, int max_rules);
std::vector<ContextEvent> random_events(Rng& rng, int max_ticks);
ContextSnapshot base_snapshot();

/// Path under the repository's data directory.
std::filesystem::path data_path(std::string_view relative);
/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(std::string_view name);

}  // namespace dspl::testing
