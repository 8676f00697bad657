//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_TRAINING_H_
#define HIERFLOW_TRAINING_H_

#include <vector>

#include <Eigen/Dense>

#include "hierflow/hierarchy.h"
#include "hierflow/molecule.h"
#include "hierflow/predictors.h"
#include "hierflow/relaxed_state.h"

namespace hierflow {

/**
 * @brief Convex combination t*endpoint + (1-t)*prior of every variable.
 *
 * Probabilities are combined exactly, parent rows are then passed through
 * causal_renormalize(), and logits are recomputed from the probabilities with
 * clipping at @p clip. Masks and leaf anchors must agree between the inputs.
 */
RelaxedState interpolate(const RelaxedState &endpoint,
                         const RelaxedState &prior, double t,
                         double clip = kDefaultClipEps);

struct LossWeights {
  double bond = 1.0;
  double plan = 1.0;
  double coord = 1.0;
};

// Hard labels of a training target in the sampler layout.
struct LossTargets {
  std::vector<int> elements;
  std::vector<int> bonds;    // per pair i < j
  std::vector<int> types;    // per token
  std::vector<int> parents;  // per token, -1 for ROOT and pads
  Eigen::MatrixX3d coords;
  std::vector<bool> token_mask;

  static LossTargets from(const Molecule &mol, const HierarchyPlan &padded);
};

struct LossBreakdown {
  double atom = 0.0;
  double bond = 0.0;
  double type = 0.0;
  double parent = 0.0;
  double coord = 0.0;
  double total = 0.0;

  double plan() const { return type + parent; }
};

// Gradient of the total loss with respect to the prediction.
struct LossGradient {
  Eigen::MatrixXd atom;
  Eigen::MatrixXd bond;
  Eigen::MatrixXd type;
  Eigen::MatrixXd parent;
  Eigen::MatrixX3d coords;
};

/**
 * @brief Endpoint losses of a prediction against hard targets.
 *
 * Cross-entropies are summed over atoms, pairs i < j, unmasked tokens, and
 * unmasked non-ROOT parent rows (softmax restricted to the causal support).
 * The coordinate term is the mean squared distance over atoms. Throws
 * std::out_of_range for labels outside the prediction's vocabulary.
 */
LossBreakdown endpoint_losses(const EndpointPrediction &pred,
                              const LossTargets &target,
                              const LossWeights &weights = {},
                              LossGradient *grad = nullptr);

}  // namespace hierflow

#endif  // HIERFLOW_TRAINING_H_
