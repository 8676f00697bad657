//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_RINGS_H_
#define HIERFLOW_RINGS_H_

#include <vector>

#include "hierflow/molecule.h"

namespace hierflow {

using Ring = std::vector<int>;

/**
 * @brief Smallest-cycle basis of the bond graph.
 *
 * Candidates are the shortest cycle through every edge plus Horton cycles
 * from every vertex; they are sorted by length and kept greedily while
 * linearly independent over GF(2). Each ring is returned as an atom cycle
 * starting at its smallest index and continuing towards the smaller
 * neighbour. Rings are sorted by (size, sequence).
 */
std::vector<Ring> perceive_rings(const Molecule &mol);

// Same as above on a plain adjacency matrix (non-zero = edge).
std::vector<Ring> perceive_rings(const Eigen::MatrixXi &adjacency);

// Union of rings that share at least one atom. Each system is a sorted atom
// list; systems are ordered by their smallest atom.
std::vector<std::vector<int>> fuse_rings(const std::vector<Ring> &rings);

}  // namespace hierflow

#endif  // HIERFLOW_RINGS_H_
