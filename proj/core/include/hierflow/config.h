//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_CONFIG_H_
#define HIERFLOW_CONFIG_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hierflow/elements.h"
#include "hierflow/energies.h"
#include "hierflow/hierarchy.h"
#include "hierflow/metrics.h"
#include "hierflow/predictors.h"
#include "hierflow/priors.h"
#include "hierflow/sampler.h"

namespace hierflow {

class ConfigError: public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PredictorKind { kOracle, kCorrupted, kExternal };

struct PredictorConfig {
  PredictorKind kind = PredictorKind::kOracle;
  std::vector<std::filesystem::path> targets;  // empty: built-in set
  OracleOptions oracle;
  CorruptionOptions corruption;
  std::string command;   // external predictors only
  std::string work_dir;  // external predictors only
};

/**
 * @brief Everything a run depends on.
 *
 * JSON sections: elements, bonds, hierarchy, energies, sampler, priors,
 * predictor, metrics. All sections are optional; unknown keys are errors.
 * Paths inside the file are resolved against the file's directory.
 */
struct RunConfig {
  ElementTable elements = ElementTable::defaults();
  BondOrders bonds = BondOrders::with_aromatic();
  HierarchyConfig hierarchy;
  EnergyConfig energies;
  SamplerConfig sampler;
  std::optional<PriorTables> priors;  // estimated from targets when absent
  PredictorConfig predictor;
  ValidityConfig metrics;

  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json &j,
                             const std::filesystem::path &base_dir = {});
  static RunConfig load(const std::filesystem::path &path);
};

// 16 hex characters over the canonical JSON form.
std::string config_hash(const RunConfig &config);

nlohmann::json hierarchy_config_to_json(const HierarchyConfig &c);
HierarchyConfig hierarchy_config_from_json(const nlohmann::json &j);

}  // namespace hierflow

#endif  // HIERFLOW_CONFIG_H_
