//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_LIBRARY_H_
#define HIERFLOW_LIBRARY_H_

#include <string>
#include <vector>

#include "hierflow/elements.h"
#include "hierflow/molecule.h"

namespace hierflow {

struct NamedMolecule {
  std::string name;
  Molecule mol;
};

/**
 * @brief Small heavy-atom molecules with idealised planar coordinates.
 *
 * Used as default targets for reference predictors. Aromatic rings use the
 * aromatic category when @p orders has one and alternate single/double
 * otherwise. Requires C, N and O in @p table.
 */
std::vector<NamedMolecule> builtin_molecules(const ElementTable &table,
                                             const BondOrders &orders);

}  // namespace hierflow

#endif  // HIERFLOW_LIBRARY_H_
