//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/molecule.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hierflow {

Molecule::Molecule(int n)
    : elements(n, 0), bonds(Eigen::MatrixXi::Zero(n, n)),
      coords(Eigen::MatrixX3d::Zero(n, 3)) { }

Molecule::Molecule(std::vector<int> elems, Eigen::MatrixXi bond_matrix,
                   Eigen::MatrixX3d xyz)
    : elements(std::move(elems)), bonds(std::move(bond_matrix)),
      coords(std::move(xyz)) { }

void Molecule::add_bond(int i, int j, int type) {
  bonds(i, j) = type;
  bonds(j, i) = type;
}

std::vector<int> Molecule::neighbors(int i) const {
  std::vector<int> nbrs;
  for (int j = 0; j < size(); ++j) {
    if (j != i && bonds(i, j) > 0)
      nbrs.push_back(j);
  }
  return nbrs;
}

double Molecule::bond_order_sum(int i, const BondOrders &orders) const {
  double sum = 0;
  for (int j = 0; j < size(); ++j) {
    if (j != i)
      sum += orders[bonds(i, j)];
  }
  return sum;
}

void Molecule::validate(const ElementTable &table,
                        const BondOrders &orders) const {
  const int n = size();
  if (bonds.rows() != n || bonds.cols() != n)
    throw std::invalid_argument("bond matrix shape does not match atom count");
  if (coords.rows() != n)
    throw std::invalid_argument("coordinate rows do not match atom count");
  for (int i = 0; i < n; ++i) {
    if (elements[i] < 0 || elements[i] >= table.size())
      throw std::invalid_argument("element index out of vocabulary at atom "
                                  + std::to_string(i));
    if (bonds(i, i) != 0)
      throw std::invalid_argument("non-zero bond matrix diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (bonds(i, j) != bonds(j, i))
        throw std::invalid_argument("bond matrix is not symmetric");
      if (bonds(i, j) < 0 || bonds(i, j) >= orders.size())
        throw std::invalid_argument("bond type out of vocabulary");
    }
  }
  if (!coords.allFinite())
    throw std::invalid_argument("non-finite coordinates");
}

bool Molecule::operator==(const Molecule &other) const {
  return elements == other.elements && bonds.rows() == other.bonds.rows()
         && bonds == other.bonds && coords.rows() == other.coords.rows()
         && coords == other.coords;
}

Molecule molecule_from_json(const nlohmann::json &j,
                            const ElementTable &table) {
  const auto &symbols = j.at("elements");
  const int n = static_cast<int>(symbols.size());
  Molecule mol(n);
  for (int i = 0; i < n; ++i)
    mol.elements[i] = table.index_of(symbols[i].get<std::string>());

  if (j.contains("bonds")) {
    for (const auto &b: j.at("bonds")) {
      if (b.size() != 3)
        throw std::invalid_argument("bond entries must be [i, j, k]");
      int u = b[0].get<int>(), v = b[1].get<int>(), k = b[2].get<int>();
      if (u < 0 || v < 0 || u >= n || v >= n || u >= v)
        throw std::invalid_argument("bond indices must satisfy 0 <= i < j < N");
      if (k < 1)
        throw std::invalid_argument("bond types must be >= 1");
      mol.add_bond(u, v, k);
    }
  }

  if (j.contains("coords")) {
    const auto &xyz = j.at("coords");
    if (static_cast<int>(xyz.size()) != n)
      throw std::invalid_argument("coords length does not match elements");
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d)
        mol.coords(i, d) = xyz[i].at(d).get<double>();
    }
  }
  return mol;
}

nlohmann::json molecule_to_json(const Molecule &mol,
                                const ElementTable &table) {
  nlohmann::json j;
  auto &elements = j["elements"] = nlohmann::json::array();
  for (int e: mol.elements)
    elements.push_back(table.at(e).symbol);

  auto &bonds = j["bonds"] = nlohmann::json::array();
  for (int i = 0; i < mol.size(); ++i) {
    for (int k = i + 1; k < mol.size(); ++k) {
      if (mol.bonds(i, k) > 0)
        bonds.push_back({ i, k, mol.bonds(i, k) });
    }
  }

  auto &coords = j["coords"] = nlohmann::json::array();
  for (int i = 0; i < mol.size(); ++i)
    coords.push_back({ mol.coords(i, 0), mol.coords(i, 1), mol.coords(i, 2) });
  return j;
}

Molecule load_molecule(const std::filesystem::path &path,
                       const ElementTable &table) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open molecule file " + path.string());
  return molecule_from_json(nlohmann::json::parse(in), table);
}

void save_molecule(const std::filesystem::path &path, const Molecule &mol,
                   const ElementTable &table) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write molecule file " + path.string());
  out << molecule_to_json(mol, table).dump(2) << '\n';
}

std::string to_xyz(const Molecule &mol, const ElementTable &table,
                   std::string_view comment) {
  std::ostringstream out;
  out << mol.size() << '\n' << comment << '\n';
  char line[128];
  for (int i = 0; i < mol.size(); ++i) {
    std::snprintf(line, sizeof(line), "%-2s %14.8f %14.8f %14.8f\n",
                  table.at(mol.elements[i]).symbol.c_str(), mol.coords(i, 0),
                  mol.coords(i, 1), mol.coords(i, 2));
    out << line;
  }
  return out.str();
}

}  // namespace hierflow
