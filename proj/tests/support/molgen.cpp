//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molgen.h"

#include <algorithm>
#include <queue>

namespace hierflow::testing {
namespace {
  int graph_distance(const Molecule &m, int s, int t) {
    std::vector<int> dist(m.size(), -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      if (u == t)
        return dist[u];
      for (int v: m.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
      }
    }
    return -1;
  }

  void relax(Molecule &m, std::mt19937_64 &rng, int iterations) {
    const int n = m.size();
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d)
        m.coords(i, d) = 1.5 * normal(rng);
    }
    for (int it = 0; it < iterations; ++it) {
      Eigen::MatrixX3d f = Eigen::MatrixX3d::Zero(n, 3);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          Eigen::RowVector3d d = m.coords.row(j) - m.coords.row(i);
          const double r = std::max(d.norm(), 1e-6);
          double mag = 0.0;
          if (m.bonds(i, j) != 0)
            mag = r - 1.45;
          else if (r < 2.4)
            mag = r - 2.4;
          f.row(i) += mag * d / r;
          f.row(j) -= mag * d / r;
        }
      }
      m.coords += 0.2 * f;
    }
  }
}  // namespace

Molecule random_molecule(std::mt19937_64 &rng, const ElementTable &table,
                         const BondOrders &orders, const MolGenOptions &o) {
  std::uniform_int_distribution<int> size(o.min_atoms, o.max_atoms);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int c = table.index_of("C"), nn = table.index_of("N"),
            ox = table.index_of("O");
  const int n = size(rng);

  Molecule m(n);
  for (int i = 0; i < n; ++i) {
    const double u = unit(rng);
    m.elements[i] = u < o.nitrogen ? nn : u < o.nitrogen + o.oxygen ? ox : c;
  }
  auto spare = [&](int i) {
    return table[m.elements[i]].max_valence - m.bond_order_sum(i, orders);
  };
  for (int k = 1; k < n; ++k) {
    std::vector<int> cand;
    for (int j = 0; j < k; ++j) {
      if (spare(j) >= 1.0)
        cand.push_back(j);
    }
    if (cand.empty()) {
      m.elements[k - 1] = c;
      for (int j = 0; j < k; ++j) {
        if (spare(j) >= 1.0)
          cand.push_back(j);
      }
    }
    std::uniform_int_distribution<int> pick(0, static_cast<int>(cand.size()) - 1);
    m.add_bond(cand[pick(rng)], k, 1);
  }
  for (int r = 0; r < o.max_ring_closures; ++r) {
    if (unit(rng) >= o.ring_closure_prob)
      continue;
    std::vector<std::pair<int, int>> cand;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (m.bonds(i, j) == 0 && spare(i) >= 1.0 && spare(j) >= 1.0
            && graph_distance(m, i, j) >= 2 && graph_distance(m, i, j) <= 6)
          cand.emplace_back(i, j);
      }
    }
    if (cand.empty())
      continue;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(cand.size()) - 1);
    const auto [i, j] = cand[pick(rng)];
    m.add_bond(i, j, 1);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (m.bonds(i, j) == 0 || unit(rng) >= o.multiple_bond_prob)
        continue;
      const int up = m.bonds(i, j) + 1;
      if (up <= 3 && spare(i) >= 1.0 && spare(j) >= 1.0)
        m.bonds(i, j) = m.bonds(j, i) = up;
    }
  }
  relax(m, rng, o.relax_iterations);
  return m;
}

Molecule make_molecule(const ElementTable &table,
                       const std::vector<std::string> &symbols,
                       const std::vector<std::array<int, 3>> &bonds) {
  const int n = static_cast<int>(symbols.size());
  Molecule mol(n);
  for (int i = 0; i < n; ++i) {
    mol.elements[i] = table.index_of(symbols[i]);
    mol.coords(i, 0) = 1.5 * i;
  }
  for (const auto &[i, j, k]: bonds)
    mol.add_bond(i, j, k);
  return mol;
}

Molecule permute_molecule(const Molecule &mol, const std::vector<int> &perm) {
  const int n = mol.size();
  Molecule out(n);
  for (int i = 0; i < n; ++i) {
    out.elements[i] = mol.elements[perm[i]];
    out.coords.row(i) = mol.coords.row(perm[i]);
    for (int j = 0; j < n; ++j)
      out.bonds(i, j) = mol.bonds(perm[i], perm[j]);
  }
  return out;
}

Molecule random_overbonded(std::mt19937_64 &rng, const ElementTable &table,
                           const BondOrders &orders, int n) {
  MolGenOptions opts;
  opts.min_atoms = opts.max_atoms = std::max(n, 2);
  Molecule mol = random_molecule(rng, table, orders, opts);
  std::uniform_int_distribution<int> atom(0, mol.size() - 1);
  std::uniform_int_distribution<int> order(1, 2);
  auto violated = [&] {
    for (int i = 0; i < mol.size(); ++i) {
      if (mol.bond_order_sum(i, orders) > table[mol.elements[i]].max_valence)
        return true;
    }
    return false;
  };
  while (!violated()) {
    const int i = atom(rng);
    const int j = atom(rng);
    if (i != j)
      mol.bonds(i, j) = mol.bonds(j, i) = std::min(mol.bonds(i, j) + order(rng), 3);
  }
  return mol;
}

}  // namespace hierflow::testing
