//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_RELAXED_STATE_H_
#define HIERFLOW_RELAXED_STATE_H_

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hierflow/elements.h"

namespace hierflow {

inline constexpr double kDefaultClipEps = 1e-6;

// Logit assigned to every non-pad category of a padded slot. softmax then
// puts at most exp(-50) mass outside category 0.
inline constexpr double kPadLogit = -50.0;

inline int num_pairs(int n) { return n * (n - 1) / 2; }

// Row of the unordered pair (i, j) in an n-atom pair list; requires i != j.
inline int pair_index(int i, int j, int n) {
  if (i > j)
    std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

// Inverse of pair_index().
std::pair<int, int> pair_atoms(int p, int n);

struct StateDims {
  int atoms = 0;
  int atom_types = 0;
  int bond_types = 0;
  int tokens = 0;
  int token_types = 0;
};

/**
 * @brief Relaxed molecular state at time t.
 *
 * Every categorical variable is stored as a row of unconstrained logits
 * together with the matching probability row. Bond rows exist only for i < j
 * (see pair_index()), so symmetry holds structurally. Padded atoms and tokens
 * are pinned to category 0. Parent rows follow the causal constraint: row
 * alpha only has support on unmasked beta < alpha; the ROOT row (0) is
 * all-zero, and logits outside the support are held at 0 and ignored.
 */
struct RelaxedState {
  double t = 0.0;

  Eigen::MatrixXd atom_logits;    // N x C_a
  Eigen::MatrixXd bond_logits;    // N(N-1)/2 x K
  Eigen::MatrixXd type_logits;    // A x C_h
  Eigen::MatrixXd parent_logits;  // A x A

  Eigen::MatrixXd atom_probs;
  Eigen::MatrixXd bond_probs;
  Eigen::MatrixXd type_probs;
  Eigen::MatrixXd parent_probs;

  Eigen::MatrixX3d coords;

  std::vector<bool> atom_mask;
  std::vector<bool> token_mask;
  std::vector<int> leaf_anchor;  // atom -> token

  static RelaxedState zeros(const StateDims &dims);

  StateDims dims() const;
  int num_atoms() const { return static_cast<int>(atom_logits.rows()); }
  int num_tokens() const { return static_cast<int>(type_logits.rows()); }
  int num_active_atoms() const;

  bool pair_active(int i, int j) const { return atom_mask[i] && atom_mask[j]; }
  bool parent_valid(int alpha, int beta) const;

  // Pins padded slots, clears parent logits outside the causal support and
  // recomputes every probability block from the logits.
  void refresh_probabilities();

  // Largest deviation from the simplex constraints over all stored
  // distributions (negative entries, row sums, logit/probability mismatch).
  double simplex_violation() const;
};

// Throws NumericalError for NaN/Inf input.
Eigen::VectorXd logits_to_probs(const Eigen::Ref<const Eigen::VectorXd> &z);

// Clips p to [eps, 1 - eps] and returns log-probabilities whose softmax is
// the clipped-and-renormalized p. Throws std::invalid_argument for negative
// entries.
Eigen::VectorXd probs_to_logits(const Eigen::Ref<const Eigen::VectorXd> &p,
                                double eps = kDefaultClipEps);

// Softmax restricted to entries with valid[k] == true; others get 0.
Eigen::VectorXd masked_softmax(const Eigen::Ref<const Eigen::VectorXd> &z,
                               const std::vector<bool> &valid);

// Pulls a probability-space gradient back through softmax:
// dz = p * (g - <p, g>).
Eigen::VectorXd softmax_backward(const Eigen::Ref<const Eigen::VectorXd> &p,
                                 const Eigen::Ref<const Eigen::VectorXd> &g);

// Row-wise softmax_backward(); rows with row_mask[r] == false become zero.
Eigen::MatrixXd softmax_backward_rows(const Eigen::MatrixXd &probs,
                                      const Eigen::MatrixXd &grad,
                                      const std::vector<bool> &row_mask = {});

double expected_bond_order(const Eigen::Ref<const Eigen::VectorXd> &x,
                           const BondOrders &orders);

double soft_degree(const RelaxedState &state, int i, const BondOrders &orders);
Eigen::VectorXd soft_degrees(const RelaxedState &state,
                             const BondOrders &orders);

// Translates coords so the mean over unmasked rows is zero. An empty mask
// means all rows are active.
Eigen::MatrixX3d recenter(const Eigen::MatrixX3d &coords,
                          const std::vector<bool> &mask = {});

}  // namespace hierflow

#endif  // HIERFLOW_RELAXED_STATE_H_
