//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_GRAPH_HASH_H_
#define HIERFLOW_GRAPH_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hierflow {

struct LabeledEdge {
  int u;
  int v;
  int type;
};

std::uint64_t hash_bytes(std::string_view bytes, std::uint64_t seed = 0);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/**
 * @brief Permutation-invariant digest of a node- and edge-labelled graph.
 *
 * Nodes are seeded with (label, sorted incident edge types) and refined for
 * max(n, 1) rounds of neighbourhood aggregation over (edge type, neighbour
 * label) multisets. The sorted final labels are folded into a 128-bit digest
 * returned as 32 hex characters. Graphs that colour refinement cannot tell
 * apart (e.g. some pairs of regular graphs) receive the same digest.
 */
std::string wl_graph_hash(const std::vector<std::string> &node_labels,
                          const std::vector<LabeledEdge> &edges);

}  // namespace hierflow

#endif  // HIERFLOW_GRAPH_HASH_H_
