//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_MOLECULE_H_
#define HIERFLOW_MOLECULE_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hierflow/elements.h"

namespace hierflow {

/**
 * @brief Discrete molecule: element categories, a symmetric bond-type
 *        matrix with zero diagonal, and coordinates in Å.
 */
struct Molecule {
  std::vector<int> elements;
  Eigen::MatrixXi bonds;
  Eigen::MatrixX3d coords;

  Molecule() = default;
  explicit Molecule(int n);
  Molecule(std::vector<int> elems, Eigen::MatrixXi bond_matrix,
           Eigen::MatrixX3d xyz);

  int size() const { return static_cast<int>(elements.size()); }

  void add_bond(int i, int j, int type);

  // Neighbors of atom i with bond type > 0, in increasing index order.
  std::vector<int> neighbors(int i) const;

  double bond_order_sum(int i, const BondOrders &orders) const;

  // Throws std::invalid_argument if a structural invariant is violated.
  void validate(const ElementTable &table, const BondOrders &orders) const;

  bool operator==(const Molecule &other) const;
};

// {"elements": [...], "bonds": [[i, j, k], ...], "coords": [[x, y, z], ...]}
Molecule molecule_from_json(const nlohmann::json &j,
                            const ElementTable &table);
nlohmann::json molecule_to_json(const Molecule &mol, const ElementTable &table);

Molecule load_molecule(const std::filesystem::path &path,
                       const ElementTable &table);
void save_molecule(const std::filesystem::path &path, const Molecule &mol,
                   const ElementTable &table);

std::string to_xyz(const Molecule &mol, const ElementTable &table,
                   std::string_view comment = "");

}  // namespace hierflow

#endif  // HIERFLOW_MOLECULE_H_
