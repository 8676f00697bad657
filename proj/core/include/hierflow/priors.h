//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_PRIORS_H_
#define HIERFLOW_PRIORS_H_

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hierflow/elements.h"
#include "hierflow/hierarchy.h"
#include "hierflow/molecule.h"
#include "hierflow/relaxed_state.h"

namespace hierflow {

enum class PriorMode {
  kSampled,   // one-hot draws from the marginals
  kMarginal,  // the marginals themselves
};

// Fixes the atom count (and optionally the motif count) of a prior draw.
struct SizeHint {
  int atoms = 0;
  int motifs = -1;
};

struct PriorTables {
  std::map<int, double> size;                        // N -> probability
  std::map<int, std::vector<double>> atom_types;     // N -> C_a
  std::map<int, std::vector<double>> bond_types;     // N -> K
  std::map<int, std::vector<double>> motif_counts;   // N -> over 0..M_max
  std::map<std::string, double> motif_types;         // signature -> prob
  double sigma_r = 1.0;
  PriorMode mode = PriorMode::kSampled;

  bool supports(int n) const;

  // Throws std::invalid_argument if a table is not a distribution or has
  // the wrong width.
  void validate(int num_atom_types, int num_bond_types) const;

  // Empirical statistics of a molecule set.
  static PriorTables estimate(const std::vector<Molecule> &mols,
                              const ElementTable &table,
                              const BondOrders &orders,
                              const HierarchyConfig &config);

  nlohmann::json to_json() const;
  static PriorTables from_json(const nlohmann::json &j);
};

// Token layout used by the sampler: [ROOT][max_motifs slots][N leaves].
int leaf_token(int atom, int max_motifs);

/**
 * @brief Draws the t = 0 state.
 *
 * Atom and bond categories, motif count and motif types follow the tables
 * (or the hint); leaf types copy the sampled element; parents are uniform
 * over valid earlier tokens; coordinates are centred Gaussian noise.
 * Probabilities are clipped before conversion to logits. Throws
 * std::invalid_argument when N is not covered by the tables.
 */
RelaxedState sample_prior(const PriorTables &tables,
                          const TokenVocabulary &vocab,
                          const ElementTable &table, const BondOrders &orders,
                          const HierarchyConfig &config, std::mt19937_64 &rng,
                          const std::optional<SizeHint> &hint = std::nullopt,
                          double clip = kDefaultClipEps);

}  // namespace hierflow

#endif  // HIERFLOW_PRIORS_H_
