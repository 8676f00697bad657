//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_GRADCHECK_H_
#define HIERFLOW_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hierflow/energies.h"
#include "hierflow/training.h"

namespace hierflow {

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-5;
  // Relative floor on the error denominator, scaled by max(1, |f|).
  double floor = 1e-7;
};

struct BlockCheck {
  std::string label;  // e.g. "valence/bond"
  double rel_err = 0.0;
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
  bool passed = true;
};

struct GradcheckReport {
  std::vector<BlockCheck> checks;

  bool passed() const;
  double max_rel_err() const;
  std::vector<BlockCheck> failures() const;
  void append(const GradcheckReport &other);
  nlohmann::json to_json() const;
};

/**
 * @brief Compare an analytic gradient block with central differences.
 *
 * @p eval receives the perturbed block and returns the objective. The error
 * is ||a - n||_inf / max(||a||_inf, ||n||_inf, floor * max(1, |f|)).
 */
BlockCheck check_block(const std::string &label,
                       const std::function<double(const Eigen::MatrixXd &)> &eval,
                       const Eigen::MatrixXd &x, const Eigen::MatrixXd &analytic,
                       const GradcheckOptions &opts = {});

struct RandomStateOptions {
  int atoms = 6;
  int atom_types = 10;
  int bond_types = 5;
  int max_motifs = 3;
  int token_types = 8;
  double logit_scale = 1.5;
  double coord_scale = 1.2;
};

// Random relaxed state in the sampler layout (no padded atoms).
RelaxedState random_relaxed_state(std::mt19937_64 &rng,
                                  const RandomStateOptions &opts);

// Similarity matrix, motif groups and one ring over the active atoms.
EnergyInputs random_energy_inputs(std::mt19937_64 &rng,
                                  const RelaxedState &state);

// Atom-logit, bond-logit and coordinate blocks of every energy term.
GradcheckReport energy_gradcheck(const EnergyModel &model,
                                 const RelaxedState &state,
                                 const EnergyInputs &inputs,
                                 const GradcheckOptions &opts = {});

// Every block of the endpoint loss gradient.
GradcheckReport loss_gradcheck(const EndpointPrediction &pred,
                               const LossTargets &target,
                               const LossWeights &weights = {},
                               const GradcheckOptions &opts = {});

// @p samples random states with 2..max_atoms atoms plus one loss instance per
// state, all derived from @p seed.
GradcheckReport run_gradcheck_suite(const EnergyModel &model, int samples,
                                    int max_atoms, std::uint64_t seed,
                                    const GradcheckOptions &opts = {});

}  // namespace hierflow

#endif  // HIERFLOW_GRADCHECK_H_
