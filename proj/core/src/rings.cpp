//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/rings.h"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace hierflow {
namespace {
  using Bits = std::vector<std::uint64_t>;

  struct EdgeList {
    std::vector<std::vector<int>> adj;
    std::map<std::pair<int, int>, int> ids;
  };

  EdgeList make_edges(const Eigen::MatrixXi &m) {
    const int n = static_cast<int>(m.rows());
    EdgeList g;
    g.adj.resize(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && m(i, j) != 0)
          g.adj[i].push_back(j);
      }
      for (int j = i + 1; j < n; ++j) {
        if (m(i, j) != 0)
          g.ids.emplace(std::make_pair(i, j), static_cast<int>(g.ids.size()));
      }
    }
    return g;
  }

  // BFS from src; returns parent pointers (-1 unreachable, src -> src).
  // Neighbours are visited in increasing order so ties resolve to the
  // smallest parent. The edge (skip_u, skip_v) is ignored when given.
  std::vector<int> bfs_parents(const EdgeList &g, int src, int skip_u = -1,
                               int skip_v = -1) {
    std::vector<int> parent(g.adj.size(), -1);
    std::deque<int> queue { src };
    parent[src] = src;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v: g.adj[u]) {
        if ((u == skip_u && v == skip_v) || (u == skip_v && v == skip_u))
          continue;
        if (parent[v] < 0) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    return parent;
  }

  std::vector<int> path_to(const std::vector<int> &parent, int v) {
    std::vector<int> path;
    while (parent[v] != v) {
      path.push_back(v);
      v = parent[v];
    }
    path.push_back(v);
    std::reverse(path.begin(), path.end());
    return path;
  }

  Ring normalize(Ring cycle) {
    auto it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), it, cycle.end());
    if (cycle.size() > 2 && cycle.back() < cycle[1])
      std::reverse(cycle.begin() + 1, cycle.end());
    return cycle;
  }

  Bits edge_bits(const EdgeList &g, const Ring &cycle) {
    Bits bits((g.ids.size() + 63) / 64, 0);
    for (size_t k = 0; k < cycle.size(); ++k) {
      int u = cycle[k], v = cycle[(k + 1) % cycle.size()];
      int id = g.ids.at({ std::min(u, v), std::max(u, v) });
      bits[id / 64] ^= std::uint64_t { 1 } << (id % 64);
    }
    return bits;
  }

  int lowest_bit(const Bits &b) {
    for (size_t w = 0; w < b.size(); ++w) {
      if (b[w] != 0)
        return static_cast<int>(w * 64) + __builtin_ctzll(b[w]);
    }
    return -1;
  }

  // Gaussian elimination over GF(2) keyed by lowest set bit.
  class Gf2Basis {
  public:
    bool insert(Bits v) {
      for (;;) {
        int p = lowest_bit(v);
        if (p < 0)
          return false;
        auto it = rows_.find(p);
        if (it == rows_.end()) {
          rows_.emplace(p, std::move(v));
          return true;
        }
        for (size_t w = 0; w < v.size(); ++w)
          v[w] ^= it->second[w];
      }
    }

  private:
    std::map<int, Bits> rows_;
  };

  int count_components(const EdgeList &g) {
    const int n = static_cast<int>(g.adj.size());
    std::vector<bool> seen(n, false);
    int comps = 0;
    for (int s = 0; s < n; ++s) {
      if (seen[s])
        continue;
      ++comps;
      std::deque<int> queue { s };
      seen[s] = true;
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v: g.adj[u]) {
          if (!seen[v]) {
            seen[v] = true;
            queue.push_back(v);
          }
        }
      }
    }
    return comps;
  }
}  // namespace

std::vector<Ring> perceive_rings(const Eigen::MatrixXi &adjacency) {
  const EdgeList g = make_edges(adjacency);
  const int n = static_cast<int>(g.adj.size());
  const int rank = static_cast<int>(g.ids.size()) - n + count_components(g);
  if (rank <= 0)
    return {};

  std::set<Ring> candidates;

  for (const auto &[edge, id]: g.ids) {
    auto [u, v] = edge;
    std::vector<int> parent = bfs_parents(g, u, u, v);
    if (parent[v] < 0)
      continue;  // bridge
    candidates.insert(normalize(path_to(parent, v)));
  }

  for (int root = 0; root < n; ++root) {
    std::vector<int> parent = bfs_parents(g, root);
    for (const auto &[edge, id]: g.ids) {
      auto [x, y] = edge;
      if (parent[x] < 0 || parent[x] == y || parent[y] == x)
        continue;
      std::vector<int> px = path_to(parent, x), py = path_to(parent, y);
      std::set<int> on_px(px.begin() + 1, px.end());
      bool disjoint = std::none_of(py.begin() + 1, py.end(),
                                   [&](int a) { return on_px.count(a) > 0; });
      if (!disjoint)
        continue;
      Ring cycle = px;
      cycle.insert(cycle.end(), py.rbegin(), py.rend() - 1);
      candidates.insert(normalize(std::move(cycle)));
    }
  }

  std::vector<Ring> sorted(candidates.begin(), candidates.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Ring &a, const Ring &b) {
                     return a.size() < b.size();
                   });

  Gf2Basis basis;
  std::vector<Ring> rings;
  for (const Ring &c: sorted) {
    if (static_cast<int>(rings.size()) == rank)
      break;
    if (basis.insert(edge_bits(g, c)))
      rings.push_back(c);
  }

  // Fundamental cycles always span the cycle space; only reached on graphs
  // where the candidate families above are insufficient.
  for (int root = 0; root < n && static_cast<int>(rings.size()) < rank;
       ++root) {
    std::vector<int> parent = bfs_parents(g, root);
    for (const auto &[edge, id]: g.ids) {
      auto [x, y] = edge;
      if (parent[x] < 0 || parent[x] == y || parent[y] == x)
        continue;
      std::vector<int> px = path_to(parent, x), py = path_to(parent, y);
      size_t common = 0;
      while (common < px.size() && common < py.size()
             && px[common] == py[common])
        ++common;
      Ring cycle(px.begin() + common - 1, px.end());
      cycle.insert(cycle.end(), py.rbegin(), py.rend() - common);
      cycle = normalize(std::move(cycle));
      if (basis.insert(edge_bits(g, cycle)))
        rings.push_back(std::move(cycle));
    }
  }

  std::sort(rings.begin(), rings.end(), [](const Ring &a, const Ring &b) {
    if (a.size() != b.size())
      return a.size() < b.size();
    return a < b;
  });
  return rings;
}

std::vector<Ring> perceive_rings(const Molecule &mol) {
  return perceive_rings(mol.bonds);
}

std::vector<std::vector<int>> fuse_rings(const std::vector<Ring> &rings) {
  const int r = static_cast<int>(rings.size());
  std::vector<int> root(r);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int x) {
    while (root[x] != x)
      x = root[x] = root[root[x]];
    return x;
  };

  std::map<int, int> owner;
  for (int k = 0; k < r; ++k) {
    for (int atom: rings[k]) {
      auto [it, inserted] = owner.emplace(atom, k);
      if (!inserted) {
        int a = find(it->second), b = find(k);
        if (a != b)
          root[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::map<int, std::set<int>> systems;
  for (int k = 0; k < r; ++k)
    systems[find(k)].insert(rings[k].begin(), rings[k].end());

  std::vector<std::vector<int>> out;
  for (auto &[_, atoms]: systems)
    out.emplace_back(atoms.begin(), atoms.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hierflow
