//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_HIERARCHY_H_
#define HIERFLOW_HIERARCHY_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hierflow/elements.h"
#include "hierflow/molecule.h"
#include "hierflow/rings.h"

namespace hierflow {

enum class TokenKind { kRoot, kMotif, kLeaf };

std::string_view token_kind_name(TokenKind kind);
TokenKind token_kind_from_name(std::string_view name);

enum class FragmentationMode { kRecapLike, kBricsLike };

std::string_view fragmentation_mode_name(FragmentationMode mode);
FragmentationMode fragmentation_mode_from_name(std::string_view name);

struct HierarchyConfig {
  FragmentationMode mode = FragmentationMode::kRecapLike;
  int max_motifs = 16;
  int max_atoms = 64;

  int max_tokens() const { return 1 + max_motifs + max_atoms; }
};

/**
 * @brief Token-type vocabulary.
 *
 * Layout: 0 is the ROOT type (also used for padded slots), 1..C_a are leaf
 * types in element order, C_a + 1 is the unknown-motif type, and observed
 * motif signatures follow in insertion order.
 */
class TokenVocabulary {
public:
  static constexpr int kRootType = 0;

  TokenVocabulary() = default;
  TokenVocabulary(int num_elements, std::vector<std::string> signatures = {});

  int size() const {
    return 2 + num_elements_ + static_cast<int>(signatures_.size());
  }
  int num_elements() const { return num_elements_; }
  int element_type(int element) const { return 1 + element; }
  int unknown_type() const { return 1 + num_elements_; }

  // Type for a signature; the unknown type if it has not been registered.
  int motif_type(std::string_view signature) const;
  std::optional<int> find_motif(std::string_view signature) const;
  int add_motif(std::string_view signature);

  TokenKind kind_of(int type) const;
  bool is_motif_type(int type) const { return type > num_elements_; }

  const std::vector<std::string> &signatures() const { return signatures_; }

  nlohmann::json to_json() const;
  static TokenVocabulary from_json(const nlohmann::json &j);

  bool operator==(const TokenVocabulary &) const = default;

private:
  int num_elements_ = 0;
  std::vector<std::string> signatures_;
};

struct MotifEdge {
  int a;
  int b;
  int weight;

  bool operator==(const MotifEdge &) const = default;
};

struct MotifDecomposition {
  std::vector<std::vector<int>> motifs;  // sorted atom lists, by motif ID
  std::vector<std::string> signatures;
  std::vector<MotifEdge> edges;          // a < b, shared-atom counts

  int size() const { return static_cast<int>(motifs.size()); }
};

std::vector<MotifEdge>
intersection_edges(const std::vector<std::vector<int>> &motifs);

/**
 * @brief Partitions non-ring atoms into motifs by cutting eligible single
 *        bonds between non-ring atoms.
 *
 * recap_like cuts a single bond when one endpoint is N, O or S and both
 * endpoints have heavy-atom degree >= 2. brics_like also cuts C-C single
 * bonds when either carbon has another heteroatom neighbour, under the same
 * degree condition. Components of one atom are not motifs. Output motifs
 * are sorted atom lists ordered by their smallest atom.
 */
std::vector<std::vector<int>> fragment_acyclic(const Molecule &mol,
                                               const std::vector<int> &ring_atoms,
                                               FragmentationMode mode,
                                               const ElementTable &table);

// Element formula plus a refinement hash of the motif subgraph where every
// atom is marked with its number of bonds leaving the motif.
std::string motif_signature(const Molecule &mol, const std::vector<int> &atoms,
                            const ElementTable &table);

// Fused rings and acyclic fragments, merged down to config.max_motifs and
// sorted by (decreasing size, signature, atoms). Throws BudgetError when
// merging cannot reach the budget.
MotifDecomposition decompose(const Molecule &mol, const ElementTable &table,
                             const HierarchyConfig &config);

struct MotifTree {
  std::vector<int> parent;  // motif ID, or -1 for ROOT
  std::vector<int> depth;   // motifs attached to ROOT have depth 1
  std::vector<int> order;   // breadth-first, children by ID

  bool operator==(const MotifTree &) const = default;
};

/**
 * @brief Maximum spanning forest of the intersection graph.
 *
 * Kruskal over edges sorted by decreasing weight, ties by (a, b). Each
 * component is rooted at its motif with the most atoms (ties by ID) and
 * attached to ROOT.
 */
MotifTree build_motif_tree(const MotifDecomposition &decomp);

/**
 * @brief Token tree with probabilistic parent pointers.
 *
 * Token 0 is ROOT. parent_probs row alpha is a distribution over tokens
 * beta < alpha (ROOT row is zero). Hard plans have one-hot rows.
 */
struct HierarchyPlan {
  std::vector<TokenKind> kinds;
  Eigen::MatrixXd type_probs;    // A x C_h
  Eigen::MatrixXd parent_probs;  // A x A
  std::vector<int> leaf_anchor;  // atom -> token
  std::vector<bool> mask;
  std::vector<std::vector<int>> motif_atoms;  // per token; empty for non-motifs

  int num_tokens() const { return static_cast<int>(kinds.size()); }
  int num_atoms() const { return static_cast<int>(leaf_anchor.size()); }
  int num_motifs() const;

  std::vector<int> type_ids() const;  // argmax per token
  std::vector<int> parents() const;   // argmax per token, -1 for ROOT/pads

  bool operator==(const HierarchyPlan &other) const;
};

HierarchyPlan build_hierarchy(const Molecule &mol, const ElementTable &table,
                              const HierarchyConfig &config,
                              const TokenVocabulary &vocab);

// Vocabulary holding every motif signature seen in the molecules, in first
// occurrence order.
TokenVocabulary build_vocabulary(const std::vector<Molecule> &mols,
                                 const ElementTable &table,
                                 const HierarchyConfig &config);

Eigen::MatrixXd causal_renormalize(const Eigen::MatrixXd &rho,
                                   const std::vector<bool> &mask = {});

// Empty when rho satisfies the causal constraint within tol, otherwise a
// description of the first violation.
std::optional<std::string> causal_violation(const Eigen::MatrixXd &rho,
                                            const std::vector<bool> &mask = {},
                                            double tol = 1e-9);

std::optional<std::string> plan_violation(const HierarchyPlan &plan,
                                          double tol = 1e-9);

// pi(i, beta): probability that token beta is an ancestor of (or equal to)
// the leaf of atom i. Throws std::invalid_argument for non-causal input.
Eigen::MatrixXd soft_ancestor_mask(const Eigen::MatrixXd &parent_probs,
                                   const std::vector<int> &leaf_anchor,
                                   const std::vector<bool> &mask = {});
Eigen::MatrixXd soft_ancestor_mask(const HierarchyPlan &plan);

// Layout [ROOT][motifs][motif pads][leaves][leaf pads]; throws BudgetError.
HierarchyPlan pad_plan(const HierarchyPlan &plan, int max_motifs,
                       int max_atoms);
HierarchyPlan unpad_plan(const HierarchyPlan &plan);

nlohmann::json plan_to_json(const HierarchyPlan &plan);
HierarchyPlan plan_from_json(const nlohmann::json &j);

std::string describe_plan(const HierarchyPlan &plan,
                          const TokenVocabulary &vocab,
                          const ElementTable &table);

}  // namespace hierflow

#endif  // HIERFLOW_HIERARCHY_H_
