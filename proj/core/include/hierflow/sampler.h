//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_SAMPLER_H_
#define HIERFLOW_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hierflow/energies.h"
#include "hierflow/hierarchy.h"
#include "hierflow/hypgeo.h"
#include "hierflow/molecule.h"
#include "hierflow/predictors.h"
#include "hierflow/priors.h"
#include "hierflow/relaxed_state.h"

namespace hierflow {

struct SamplerConfig {
  int steps = 100;
  double eps = 1e-3;
  double t_geom = 0.7;
  double t_conn = 0.6;
  int conn_every = 5;
  // Before t_conn the connectivity gradient is evaluated at every drift
  // evaluation; when false it is left out until t_conn.
  bool conn_early = true;

  bool chem = true;
  bool cons = true;
  bool geom = true;

  bool repair = true;
  bool record_trajectory = false;
  HyperbolicConfig hyperbolic;

  void validate() const;

  nlohmann::json to_json() const;
  static SamplerConfig from_json(const nlohmann::json &j);
};

// Velocity of every logit block plus coordinates; same layout as a
// gradient.
using StateVelocity = StateGradient;

struct DriftOptions {
  bool geom_to_topology = false;  // the t >= t_geom indicator
  // Cached, already weighted logit-space connectivity gradient. Used when
  // set; otherwise connectivity is evaluated in place if enabled.
  const StateGradient *conn_cache = nullptr;
  bool include_conn = true;
};

// Hierarchy similarities between leaves from predicted token coordinates.
Eigen::MatrixXd leaf_similarity(const RelaxedState &state,
                                const Eigen::MatrixXd &token_hyperbolic,
                                const HyperbolicConfig &hyp);

// Records every state the integrator evaluates: step index, stage (0 for
// the Euler input, 1 for the corrector input, 2 after post-processing).
using StepObserver =
    std::function<void(int step, int stage, const RelaxedState &state)>;

struct IntegrationResult {
  RelaxedState final;
  std::vector<RelaxedState> trajectory;
  double max_simplex_violation = 0.0;
  int steps = 0;
};

struct Discretized {
  Molecule mol;
  Eigen::MatrixXd confidence;  // N x N, max bond probability per pair
};

struct RepairResult {
  Molecule mol;
  std::vector<std::pair<int, int>> deleted;  // in deletion order
};

class Sampler {
public:
  Sampler(EnergyModel energies, SamplerConfig config,
          HierarchyConfig hierarchy);

  const EnergyModel &energies() const { return energies_; }
  const SamplerConfig &config() const { return config_; }
  const HierarchyConfig &hierarchy() const { return hierarchy_; }

  // Endpoint term plus enabled guidance, in logit space.
  StateVelocity drift(const RelaxedState &state,
                      const EndpointPrediction &pred, double t,
                      const DriftOptions &opts = {}) const;

  // Weighted connectivity gradient eta_chem(t) * lambda_conn * grad E_conn.
  StateGradient connectivity_gradient(const RelaxedState &state,
                                      double t) const;

  IntegrationResult integrate(RelaxedState initial,
                              const EndpointPredictor &predictor,
                              const StepObserver &observer = {}) const;

  IntegrationResult sample(const PriorTables &priors,
                           const TokenVocabulary &vocab,
                           const EndpointPredictor &predictor,
                           std::uint64_t seed,
                           const StepObserver &observer = {}) const;

private:
  EnergyInputs energy_inputs(const RelaxedState &state,
                             const EndpointPrediction &pred) const;

  EnergyModel energies_;
  SamplerConfig config_;
  HierarchyConfig hierarchy_;
};

// Adds h * v to every logit block and the coordinates of s.
void apply_velocity(RelaxedState &s, const StateVelocity &v, double h);

// Recentre, pin padded slots and renormalize parents over valid entries.
void post_step(RelaxedState &s);

Discretized discretize(const RelaxedState &state);

RepairResult valence_repair(const Molecule &mol,
                            const Eigen::MatrixXd &confidence,
                            const ElementTable &table,
                            const BondOrders &orders);

// Per-sample seeds derived from a master seed by counter.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace hierflow

#endif  // HIERFLOW_SAMPLER_H_
