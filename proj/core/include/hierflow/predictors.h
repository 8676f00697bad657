//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_PREDICTORS_H_
#define HIERFLOW_PREDICTORS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hierflow/hierarchy.h"
#include "hierflow/hypgeo.h"
#include "hierflow/molecule.h"
#include "hierflow/priors.h"
#include "hierflow/relaxed_state.h"

namespace hierflow {

struct EndpointPrediction {
  Eigen::MatrixXd atom_logits;
  Eigen::MatrixXd bond_logits;
  Eigen::MatrixXd type_logits;
  Eigen::MatrixXd parent_logits;  // entries outside the causal support ignored
  Eigen::MatrixX3d coords;
  Eigen::MatrixXd token_hyperbolic;  // A x d_H ball points; may be empty

  bool all_finite() const;
};

/**
 * @brief Endpoint predictor interface.
 *
 * Implementations must be safe to call concurrently from several
 * integrations.
 */
class EndpointPredictor {
public:
  virtual ~EndpointPredictor() = default;

  virtual EndpointPrediction predict(const RelaxedState &state,
                                     double t) const = 0;

  // Sizes the predictor expects the prior to use, if it has a fixed target.
  virtual std::optional<SizeHint> size_hint() const { return std::nullopt; }
};

// Hard one-hot state of a molecule in the sampler layout, with logits
// clipped at `clip`.
RelaxedState target_state(const Molecule &mol, const HierarchyPlan &padded,
                          int num_atom_types, int num_bond_types,
                          double clip = kDefaultClipEps);

struct OracleOptions {
  double clip = kDefaultClipEps;
  HyperbolicConfig hyperbolic;
  bool emit_hyperbolic = true;
  double group_radius = 2.0;   // tangent length of a motif below ROOT
  double leaf_spread = 0.35;   // tangent offset of a leaf below its motif
  std::uint64_t seed = 0;
};

/**
 * @brief Returns the target's clipped logits and coordinates regardless of
 *        the state.
 *
 * Coordinates are the centred target translated to the state's centroid.
 * Token hyperbolic coordinates place each token at its parent's tangent
 * vector plus a fixed pseudo-random direction derived from its type and
 * position, then map through exp_map_origin, so leaves of one motif lie close
 * together.
 */
class OraclePredictor: public EndpointPredictor {
public:
  OraclePredictor(Molecule target, HierarchyPlan padded_plan,
                  int num_atom_types, int num_bond_types,
                  OracleOptions opts = {});

  static std::shared_ptr<OraclePredictor>
  from_molecule(const Molecule &mol, const ElementTable &table,
                const BondOrders &orders, const HierarchyConfig &config,
                const TokenVocabulary &vocab, OracleOptions opts = {});

  EndpointPrediction predict(const RelaxedState &state,
                             double t) const override;
  std::optional<SizeHint> size_hint() const override;

  const Molecule &target() const { return target_; }
  const HierarchyPlan &plan() const { return plan_; }
  const RelaxedState &target_logits() const { return logits_; }
  const Eigen::MatrixXd &token_hyperbolic() const { return hyperbolic_; }

private:
  Molecule target_;
  HierarchyPlan plan_;
  RelaxedState logits_;
  Eigen::MatrixX3d centered_;
  Eigen::MatrixXd hyperbolic_;
};

struct CorruptionOptions {
  double inflation_rate = 0.0;  // bonded pairs whose order is raised by one
  double spurious_rate = 0.0;   // non-bonded pairs given a single bond
  double dropout_rate = 0.0;    // bonded pairs predicted as no-bond
  double coord_noise = 0.0;     // Å, fixed per predictor
  // Relative logit of the corrupt category over the true one at a defect
  // pair: bias + feedback * clamp(state difference, -clamp, clamp).
  double bias = 0.1;
  double feedback = 1.0;
  double clamp = 1.0;
  std::uint64_t seed = 0;
};

struct BondDefect {
  int pair;
  int true_category;
  int corrupt_category;
};

/**
 * @brief Oracle with injected bond and coordinate defects.
 *
 * Defect pairs are drawn once from the seed. At a defect pair the predicted
 * corrupt category competes with the true one through a relative logit that
 * follows the current state, which makes the outcome depend on the path the
 * state takes.
 */
class CorruptedPredictor: public EndpointPredictor {
public:
  CorruptedPredictor(std::shared_ptr<const OraclePredictor> oracle,
                     const CorruptionOptions &opts,
                     const BondOrders &orders);

  EndpointPrediction predict(const RelaxedState &state,
                             double t) const override;
  std::optional<SizeHint> size_hint() const override {
    return oracle_->size_hint();
  }

  const std::vector<BondDefect> &defects() const { return defects_; }

private:
  std::shared_ptr<const OraclePredictor> oracle_;
  CorruptionOptions opts_;
  std::vector<BondDefect> defects_;
  Eigen::MatrixX3d coord_offset_;
};

/**
 * @brief Endpoint implied by the linear interpolant between a stored prior
 *        and the current probabilities: x1 = (x_t - (1 - t) x0) / t, clipped
 *        back onto the simplex.
 */
class InterpolatingPredictor: public EndpointPredictor {
public:
  explicit InterpolatingPredictor(RelaxedState prior,
                                  double clip = kDefaultClipEps);

  EndpointPrediction predict(const RelaxedState &state,
                             double t) const override;

private:
  RelaxedState prior_;
  double clip_;
};

/**
 * @brief Cross-process predictor: writes the state as JSON, runs
 *        `command <state.json> <prediction.json>` and reads the prediction.
 */
class ExternalPredictor: public EndpointPredictor {
public:
  ExternalPredictor(std::string command, std::string work_dir);

  EndpointPrediction predict(const RelaxedState &state,
                             double t) const override;

private:
  std::string command_;
  std::string work_dir_;
};

nlohmann::json state_to_json(const RelaxedState &state);
nlohmann::json prediction_to_json(const EndpointPrediction &pred);
EndpointPrediction prediction_from_json(const nlohmann::json &j);

}  // namespace hierflow

#endif  // HIERFLOW_PREDICTORS_H_
