//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/hierarchy.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "hierflow/error.h"
#include "hierflow/graph_hash.h"

namespace hierflow {
namespace {
  bool is_hetero(const ElementTable &table, int elem) {
    const std::string &s = table[elem].symbol;
    return s == "N" || s == "O" || s == "S";
  }

  bool is_hydrogen(const ElementTable &table, int elem) {
    return table[elem].symbol == "H";
  }

  int heavy_degree(const Molecule &mol, const ElementTable &table, int i) {
    int d = 0;
    for (int j: mol.neighbors(i))
      d += is_hydrogen(table, mol.elements[j]) ? 0 : 1;
    return d;
  }

  bool has_hetero_neighbor(const Molecule &mol, const ElementTable &table,
                           int i, int except) {
    for (int j: mol.neighbors(i)) {
      if (j != except && is_hetero(table, mol.elements[j]))
        return true;
    }
    return false;
  }

  bool motifs_adjacent(const Molecule &mol, const std::vector<int> &a,
                       const std::vector<int> &b) {
    for (int i: a) {
      for (int j: b) {
        if (i == j || mol.bonds(i, j) > 0)
          return true;
      }
    }
    return false;
  }

  std::vector<int> merge_sorted(const std::vector<int> &a,
                                const std::vector<int> &b) {
    std::set<int> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return { s.begin(), s.end() };
  }

  // (size, smallest atom) ordering used to pick merge candidates.
  bool smaller_motif(const std::vector<int> &a, const std::vector<int> &b) {
    if (a.size() != b.size())
      return a.size() < b.size();
    return a < b;
  }

  void merge_to_budget(const Molecule &mol,
                       std::vector<std::vector<int>> &motifs, int budget) {
    while (static_cast<int>(motifs.size()) > budget) {
      std::vector<int> order(motifs.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int x, int y) {
        return smaller_motif(motifs[x], motifs[y]);
      });

      int src = -1, dst = -1;
      for (int x: order) {
        for (int y: order) {
          if (x != y && motifs_adjacent(mol, motifs[x], motifs[y])) {
            dst = y;
            break;
          }
        }
        if (dst >= 0) {
          src = x;
          break;
        }
      }
      if (src < 0) {
        throw BudgetError(
            "hierarchy: " + std::to_string(motifs.size())
            + " motifs remain after merging, none adjacent; max_motifs = "
            + std::to_string(budget));
      }

      motifs[dst] = merge_sorted(motifs[dst], motifs[src]);
      motifs.erase(motifs.begin() + src);
    }
  }

  int argmax_row(const Eigen::MatrixXd &m, int r) {
    int best = 0;
    for (int c = 1; c < m.cols(); ++c) {
      if (m(r, c) > m(r, best))
        best = c;
    }
    return best;
  }

  bool row_is_one_hot(const Eigen::MatrixXd &m, int r, int &hot) {
    hot = -1;
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c) == 1.0 && hot < 0)
        hot = c;
      else if (m(r, c) != 0.0)
        return false;
    }
    return true;
  }

  std::string fmt_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", p);
    return buf;
  }
}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
  case TokenKind::kRoot:
    return "root";
  case TokenKind::kMotif:
    return "motif";
  case TokenKind::kLeaf:
    return "leaf";
  }
  return "unknown";
}

TokenKind token_kind_from_name(std::string_view name) {
  if (name == "root")
    return TokenKind::kRoot;
  if (name == "motif")
    return TokenKind::kMotif;
  if (name == "leaf")
    return TokenKind::kLeaf;
  throw std::invalid_argument("unknown token kind: " + std::string(name));
}

std::string_view fragmentation_mode_name(FragmentationMode mode) {
  return mode == FragmentationMode::kBricsLike ? "brics_like" : "recap_like";
}

FragmentationMode fragmentation_mode_from_name(std::string_view name) {
  if (name == "recap_like")
    return FragmentationMode::kRecapLike;
  if (name == "brics_like")
    return FragmentationMode::kBricsLike;
  throw std::invalid_argument("unknown fragmentation mode: "
                              + std::string(name));
}

/* TokenVocabulary */

TokenVocabulary::TokenVocabulary(int num_elements,
                                 std::vector<std::string> signatures)
    : num_elements_(num_elements) {
  if (num_elements < 0)
    throw std::invalid_argument("negative element count");
  for (const std::string &s: signatures)
    add_motif(s);
}

std::optional<int>
TokenVocabulary::find_motif(std::string_view signature) const {
  auto it = std::find(signatures_.begin(), signatures_.end(), signature);
  if (it == signatures_.end())
    return std::nullopt;
  return unknown_type() + 1 + static_cast<int>(it - signatures_.begin());
}

int TokenVocabulary::motif_type(std::string_view signature) const {
  return find_motif(signature).value_or(unknown_type());
}

int TokenVocabulary::add_motif(std::string_view signature) {
  if (auto id = find_motif(signature))
    return *id;
  signatures_.emplace_back(signature);
  return size() - 1;
}

TokenKind TokenVocabulary::kind_of(int type) const {
  if (type < 0 || type >= size())
    throw std::out_of_range("token type out of range");
  if (type == kRootType)
    return TokenKind::kRoot;
  return type <= num_elements_ ? TokenKind::kLeaf : TokenKind::kMotif;
}

nlohmann::json TokenVocabulary::to_json() const {
  return { { "num_elements", num_elements_ }, { "signatures", signatures_ } };
}

TokenVocabulary TokenVocabulary::from_json(const nlohmann::json &j) {
  return TokenVocabulary(
      j.at("num_elements").get<int>(),
      j.value("signatures", std::vector<std::string> {}));
}

/* Decomposition */

std::vector<MotifEdge>
intersection_edges(const std::vector<std::vector<int>> &motifs) {
  std::vector<MotifEdge> edges;
  for (int a = 0; a < static_cast<int>(motifs.size()); ++a) {
    for (int b = a + 1; b < static_cast<int>(motifs.size()); ++b) {
      std::vector<int> shared;
      std::set_intersection(motifs[a].begin(), motifs[a].end(),
                            motifs[b].begin(), motifs[b].end(),
                            std::back_inserter(shared));
      if (!shared.empty())
        edges.push_back({ a, b, static_cast<int>(shared.size()) });
    }
  }
  return edges;
}

std::vector<std::vector<int>> fragment_acyclic(const Molecule &mol,
                                               const std::vector<int> &ring_atoms,
                                               FragmentationMode mode,
                                               const ElementTable &table) {
  const int n = mol.size();
  std::vector<bool> in_ring(n, false);
  for (int a: ring_atoms)
    in_ring.at(a) = true;

  auto cut = [&](int u, int v) {
    if (mol.bonds(u, v) != 1)
      return false;
    if (heavy_degree(mol, table, u) < 2 || heavy_degree(mol, table, v) < 2)
      return false;
    const int eu = mol.elements[u], ev = mol.elements[v];
    if (is_hetero(table, eu) || is_hetero(table, ev))
      return true;
    if (mode == FragmentationMode::kBricsLike && table[eu].symbol == "C"
        && table[ev].symbol == "C") {
      return has_hetero_neighbor(mol, table, u, v)
             || has_hetero_neighbor(mol, table, v, u);
    }
    return false;
  };

  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> motifs;
  for (int s = 0; s < n; ++s) {
    if (in_ring[s] || comp[s] >= 0)
      continue;
    std::vector<int> atoms;
    std::deque<int> queue { s };
    comp[s] = s;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      atoms.push_back(u);
      for (int v: mol.neighbors(u)) {
        if (in_ring[v] || comp[v] >= 0 || cut(u, v))
          continue;
        comp[v] = s;
        queue.push_back(v);
      }
    }
    if (atoms.size() >= 2) {
      std::sort(atoms.begin(), atoms.end());
      motifs.push_back(std::move(atoms));
    }
  }
  std::sort(motifs.begin(), motifs.end());
  return motifs;
}

std::string motif_signature(const Molecule &mol, const std::vector<int> &atoms,
                            const ElementTable &table) {
  std::map<std::string, int> formula;
  std::map<int, int> local;
  for (int a: atoms) {
    formula[table[mol.elements[a]].symbol]++;
    local.emplace(a, static_cast<int>(local.size()));
  }

  std::vector<std::string> labels;
  std::vector<LabeledEdge> edges;
  for (int a: atoms) {
    int external = 0;
    for (int b: mol.neighbors(a)) {
      auto it = local.find(b);
      if (it == local.end())
        ++external;
      else if (a < b)
        edges.push_back({ local[a], it->second, mol.bonds(a, b) });
    }
    labels.push_back(table[mol.elements[a]].symbol + "*"
                     + std::to_string(external));
  }

  std::string sig;
  for (const auto &[sym, count]: formula)
    sig += sym + std::to_string(count);
  return sig + "|" + wl_graph_hash(labels, edges);
}

MotifDecomposition decompose(const Molecule &mol, const ElementTable &table,
                             const HierarchyConfig &config) {
  std::vector<std::vector<int>> motifs = fuse_rings(perceive_rings(mol));

  std::vector<int> ring_atoms;
  for (const auto &m: motifs)
    ring_atoms.insert(ring_atoms.end(), m.begin(), m.end());
  for (auto &m: fragment_acyclic(mol, ring_atoms, config.mode, table))
    motifs.push_back(std::move(m));

  merge_to_budget(mol, motifs, config.max_motifs);

  std::vector<std::tuple<std::size_t, std::string, std::vector<int>>> keyed;
  for (auto &m: motifs)
    keyed.emplace_back(m.size(), motif_signature(mol, m, table), std::move(m));
  std::sort(keyed.begin(), keyed.end(), [](const auto &x, const auto &y) {
    if (std::get<0>(x) != std::get<0>(y))
      return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y))
      return std::get<1>(x) < std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });

  MotifDecomposition out;
  for (auto &[size, sig, atoms]: keyed) {
    out.signatures.push_back(std::move(sig));
    out.motifs.push_back(std::move(atoms));
  }
  out.edges = intersection_edges(out.motifs);
  return out;
}

MotifTree build_motif_tree(const MotifDecomposition &decomp) {
  const int m = decomp.size();
  std::vector<MotifEdge> edges = decomp.edges;
  std::sort(edges.begin(), edges.end(),
            [](const MotifEdge &x, const MotifEdge &y) {
              if (x.weight != y.weight)
                return x.weight > y.weight;
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });

  std::vector<int> uf(m);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x)
      x = uf[x] = uf[uf[x]];
    return x;
  };

  std::vector<std::vector<int>> adj(m);
  for (const MotifEdge &e: edges) {
    int ra = find(e.a), rb = find(e.b);
    if (ra == rb)
      continue;
    uf[ra] = rb;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto &nbrs: adj)
    std::sort(nbrs.begin(), nbrs.end());

  std::map<int, int> comp_root;  // uf root -> root motif
  for (int k = 0; k < m; ++k) {
    auto [it, inserted] = comp_root.emplace(find(k), k);
    if (!inserted) {
      const int cur = it->second;
      if (decomp.motifs[k].size() > decomp.motifs[cur].size())
        it->second = k;
    }
  }
  std::vector<int> roots;
  for (const auto &[_, r]: comp_root)
    roots.push_back(r);
  std::sort(roots.begin(), roots.end());

  MotifTree tree;
  tree.parent.assign(m, -1);
  tree.depth.assign(m, 0);
  std::vector<bool> seen(m, false);
  std::deque<int> queue;
  for (int r: roots) {
    seen[r] = true;
    tree.depth[r] = 1;
    queue.push_back(r);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    tree.order.push_back(u);
    for (int v: adj[u]) {
      if (seen[v])
        continue;
      seen[v] = true;
      tree.parent[v] = u;
      tree.depth[v] = tree.depth[u] + 1;
      queue.push_back(v);
    }
  }
  return tree;
}

/* HierarchyPlan */

int HierarchyPlan::num_motifs() const {
  int m = 0;
  for (int a = 0; a < num_tokens(); ++a)
    m += (kinds[a] == TokenKind::kMotif && mask[a]) ? 1 : 0;
  return m;
}

std::vector<int> HierarchyPlan::type_ids() const {
  std::vector<int> ids(num_tokens());
  for (int a = 0; a < num_tokens(); ++a)
    ids[a] = argmax_row(type_probs, a);
  return ids;
}

std::vector<int> HierarchyPlan::parents() const {
  std::vector<int> out(num_tokens(), -1);
  for (int a = 1; a < num_tokens(); ++a) {
    if (mask[a])
      out[a] = argmax_row(parent_probs, a);
  }
  return out;
}

bool HierarchyPlan::operator==(const HierarchyPlan &other) const {
  auto same = [](const Eigen::MatrixXd &x, const Eigen::MatrixXd &y) {
    return x.rows() == y.rows() && x.cols() == y.cols()
           && (x.array() == y.array()).all();
  };
  return kinds == other.kinds && leaf_anchor == other.leaf_anchor
         && mask == other.mask && motif_atoms == other.motif_atoms
         && same(type_probs, other.type_probs)
         && same(parent_probs, other.parent_probs);
}

HierarchyPlan build_hierarchy(const Molecule &mol, const ElementTable &table,
                              const HierarchyConfig &config,
                              const TokenVocabulary &vocab) {
  const int n = mol.size();
  if (n > config.max_atoms) {
    throw BudgetError("hierarchy: " + std::to_string(n)
                      + " atoms exceed max_atoms = "
                      + std::to_string(config.max_atoms));
  }

  const MotifDecomposition decomp = decompose(mol, table, config);
  const MotifTree tree = build_motif_tree(decomp);
  const int m = decomp.size();
  const int a_count = 1 + m + n;

  HierarchyPlan plan;
  plan.kinds.assign(a_count, TokenKind::kLeaf);
  plan.kinds[0] = TokenKind::kRoot;
  plan.type_probs = Eigen::MatrixXd::Zero(a_count, vocab.size());
  plan.parent_probs = Eigen::MatrixXd::Zero(a_count, a_count);
  plan.mask.assign(a_count, true);
  plan.motif_atoms.assign(a_count, {});
  plan.leaf_anchor.resize(n);

  plan.type_probs(0, TokenVocabulary::kRootType) = 1.0;

  std::vector<int> token_of(m);
  for (int k = 0; k < m; ++k)
    token_of[tree.order[k]] = 1 + k;

  for (int k = 0; k < m; ++k) {
    const int motif = tree.order[k];
    const int tok = 1 + k;
    plan.kinds[tok] = TokenKind::kMotif;
    plan.motif_atoms[tok] = decomp.motifs[motif];
    plan.type_probs(tok, vocab.motif_type(decomp.signatures[motif])) = 1.0;
    const int par = tree.parent[motif];
    plan.parent_probs(tok, par < 0 ? 0 : token_of[par]) = 1.0;
  }

  // Deepest containing motif per atom; ties resolve to the earlier token.
  std::vector<int> host(n, 0), host_depth(n, 0);
  for (int k = 0; k < m; ++k) {
    const int motif = tree.order[k];
    for (int atom: decomp.motifs[motif]) {
      if (tree.depth[motif] > host_depth[atom]) {
        host_depth[atom] = tree.depth[motif];
        host[atom] = token_of[motif];
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    const int tok = 1 + m + i;
    plan.leaf_anchor[i] = tok;
    plan.type_probs(tok, vocab.element_type(mol.elements[i])) = 1.0;
    plan.parent_probs(tok, host[i]) = 1.0;
  }
  return plan;
}

TokenVocabulary build_vocabulary(const std::vector<Molecule> &mols,
                                 const ElementTable &table,
                                 const HierarchyConfig &config) {
  TokenVocabulary vocab(table.size());
  for (const Molecule &mol: mols) {
    for (const std::string &sig: decompose(mol, table, config).signatures)
      vocab.add_motif(sig);
  }
  return vocab;
}

/* Causal constraint */

Eigen::MatrixXd causal_renormalize(const Eigen::MatrixXd &rho,
                                   const std::vector<bool> &mask) {
  const int a_count = static_cast<int>(rho.rows());
  if (rho.cols() != a_count)
    throw std::invalid_argument("parent matrix must be square");
  if (!mask.empty() && static_cast<int>(mask.size()) != a_count)
    throw std::invalid_argument("mask size mismatch");
  auto active = [&](int a) { return mask.empty() || mask[a]; };

  if (!rho.allFinite() || (rho.array() < 0.0).any())
    throw std::invalid_argument("parent distributions must be non-negative");
  if (a_count > 0 && (rho.row(0).array() != 0.0).any())
    throw std::invalid_argument("ROOT token cannot have a parent");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a_count, a_count);
  for (int a = 1; a < a_count; ++a) {
    if (!active(a)) {
      out(a, 0) = 1.0;
      continue;
    }
    double total = 0.0;
    int valid = 0;
    for (int b = 0; b < a; ++b) {
      if (active(b)) {
        total += rho(a, b);
        ++valid;
      }
    }
    for (int b = 0; b < a; ++b) {
      if (!active(b))
        continue;
      out(a, b) = total > 0.0 ? rho(a, b) / total : 1.0 / valid;
    }
  }
  return out;
}

std::optional<std::string> causal_violation(const Eigen::MatrixXd &rho,
                                            const std::vector<bool> &mask,
                                            double tol) {
  const int a_count = static_cast<int>(rho.rows());
  if (rho.cols() != a_count)
    return "parent matrix is not square";
  if (!mask.empty() && static_cast<int>(mask.size()) != a_count)
    return "mask size mismatch";
  auto active = [&](int a) { return mask.empty() || mask[a]; };
  if (!rho.allFinite())
    return "non-finite parent probability";

  std::ostringstream os;
  for (int a = 0; a < a_count; ++a) {
    double sum = 0.0;
    for (int b = 0; b < a_count; ++b) {
      const double p = rho(a, b);
      if (p < -tol) {
        os << "token " << a << ": negative mass on " << b;
        return os.str();
      }
      if (b >= a && std::abs(p) > tol) {
        os << "token " << a << ": mass " << p << " on non-earlier token "
           << b;
        return os.str();
      }
      if (active(a) && !active(b) && std::abs(p) > tol) {
        os << "token " << a << ": mass on masked token " << b;
        return os.str();
      }
      sum += p;
    }
    if (a > 0 && active(a) && std::abs(sum - 1.0) > tol) {
      os << "token " << a << ": parent mass sums to " << sum;
      return os.str();
    }
  }
  return std::nullopt;
}

std::optional<std::string> plan_violation(const HierarchyPlan &plan,
                                          double tol) {
  const int a_count = plan.num_tokens();
  if (a_count == 0 || plan.kinds[0] != TokenKind::kRoot)
    return "token 0 is not ROOT";
  if (plan.type_probs.rows() != a_count || plan.parent_probs.rows() != a_count
      || static_cast<int>(plan.mask.size()) != a_count)
    return "inconsistent token counts";
  if (auto err = causal_violation(plan.parent_probs, plan.mask, tol))
    return err;

  std::set<int> anchors;
  for (int i = 0; i < plan.num_atoms(); ++i) {
    const int tok = plan.leaf_anchor[i];
    if (tok <= 0 || tok >= a_count || plan.kinds[tok] != TokenKind::kLeaf
        || !plan.mask[tok])
      return "atom " + std::to_string(i) + " has an invalid leaf anchor";
    if (!anchors.insert(tok).second)
      return "leaf anchor is not injective";
  }
  return std::nullopt;
}

Eigen::MatrixXd soft_ancestor_mask(const Eigen::MatrixXd &parent_probs,
                                   const std::vector<int> &leaf_anchor,
                                   const std::vector<bool> &mask) {
  if (auto err = causal_violation(parent_probs, mask, 1e-9))
    throw std::invalid_argument("soft_ancestor_mask: " + *err);

  const int a_count = static_cast<int>(parent_probs.rows());
  const int n = static_cast<int>(leaf_anchor.size());
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, a_count);
  for (int i = 0; i < n; ++i) {
    const int leaf = leaf_anchor[i];
    if (leaf < 0 || leaf >= a_count)
      throw std::out_of_range("leaf anchor out of range");
    pi(i, leaf) = 1.0;
    for (int b = leaf - 1; b >= 0; --b) {
      double acc = 0.0;
      for (int a = b + 1; a <= leaf; ++a)
        acc += pi(i, a) * parent_probs(a, b);
      pi(i, b) = acc;
    }
  }
  return pi;
}

Eigen::MatrixXd soft_ancestor_mask(const HierarchyPlan &plan) {
  return soft_ancestor_mask(plan.parent_probs, plan.leaf_anchor, plan.mask);
}

/* Padding */

HierarchyPlan pad_plan(const HierarchyPlan &plan, int max_motifs,
                       int max_atoms) {
  const HierarchyPlan base = unpad_plan(plan);
  const int m = base.num_motifs();
  const int n = base.num_atoms();
  if (m > max_motifs || n > max_atoms) {
    throw BudgetError("plan with " + std::to_string(m) + " motifs and "
                      + std::to_string(n) + " atoms exceeds budget ("
                      + std::to_string(max_motifs) + ", "
                      + std::to_string(max_atoms) + ")");
  }
  for (int a = 1; a <= m; ++a) {
    if (base.kinds[a] != TokenKind::kMotif)
      throw std::invalid_argument("plan tokens are not in ROOT/motif/leaf "
                                  "order");
  }

  const int a_count = 1 + max_motifs + max_atoms;
  const int c_h = static_cast<int>(base.type_probs.cols());
  std::vector<int> remap(base.num_tokens());
  remap[0] = 0;
  for (int a = 1; a <= m; ++a)
    remap[a] = a;
  for (int a = m + 1; a < base.num_tokens(); ++a)
    remap[a] = a - m + max_motifs;

  HierarchyPlan out;
  out.kinds.assign(a_count, TokenKind::kLeaf);
  out.kinds[0] = TokenKind::kRoot;
  for (int a = 1; a <= max_motifs; ++a)
    out.kinds[a] = TokenKind::kMotif;
  out.mask.assign(a_count, false);
  out.motif_atoms.assign(a_count, {});
  out.type_probs = Eigen::MatrixXd::Zero(a_count, c_h);
  out.type_probs.col(TokenVocabulary::kRootType).setOnes();
  out.parent_probs = Eigen::MatrixXd::Zero(a_count, a_count);
  out.parent_probs.col(0).setOnes();
  out.parent_probs(0, 0) = 0.0;

  for (int a = 0; a < base.num_tokens(); ++a) {
    const int r = remap[a];
    out.mask[r] = true;
    out.motif_atoms[r] = base.motif_atoms[a];
    out.type_probs.row(r) = base.type_probs.row(a);
    out.parent_probs.row(r).setZero();
    for (int b = 0; b < base.num_tokens(); ++b)
      out.parent_probs(r, remap[b]) = base.parent_probs(a, b);
  }
  out.leaf_anchor.resize(n);
  for (int i = 0; i < n; ++i)
    out.leaf_anchor[i] = remap[base.leaf_anchor[i]];
  return out;
}

HierarchyPlan unpad_plan(const HierarchyPlan &plan) {
  std::vector<int> keep;
  std::vector<int> remap(plan.num_tokens(), -1);
  for (int a = 0; a < plan.num_tokens(); ++a) {
    if (plan.mask[a]) {
      remap[a] = static_cast<int>(keep.size());
      keep.push_back(a);
    }
  }
  const int a_count = static_cast<int>(keep.size());

  HierarchyPlan out;
  out.type_probs.resize(a_count, plan.type_probs.cols());
  out.parent_probs = Eigen::MatrixXd::Zero(a_count, a_count);
  out.mask.assign(a_count, true);
  for (int k = 0; k < a_count; ++k) {
    const int a = keep[k];
    out.kinds.push_back(plan.kinds[a]);
    out.motif_atoms.push_back(plan.motif_atoms[a]);
    out.type_probs.row(k) = plan.type_probs.row(a);
    for (int l = 0; l < a_count; ++l)
      out.parent_probs(k, l) = plan.parent_probs(a, keep[l]);
  }
  out.leaf_anchor.resize(plan.num_atoms());
  for (int i = 0; i < plan.num_atoms(); ++i) {
    const int r = remap.at(plan.leaf_anchor[i]);
    if (r < 0)
      throw std::invalid_argument("leaf anchored to a masked token");
    out.leaf_anchor[i] = r;
  }
  return out;
}

/* Serialization */

nlohmann::json plan_to_json(const HierarchyPlan &plan) {
  nlohmann::json tokens = nlohmann::json::array();
  for (int a = 0; a < plan.num_tokens(); ++a) {
    nlohmann::json tok;
    tok["kind"] = token_kind_name(plan.kinds[a]);

    int hot;
    if (row_is_one_hot(plan.type_probs, a, hot) && hot >= 0) {
      tok["type_id"] = hot;
    } else {
      tok["type_id"] = argmax_row(plan.type_probs, a);
      tok["type_probs"] = std::vector<double>(
          plan.type_probs.row(a).begin(), plan.type_probs.row(a).end());
    }

    if (a == 0) {
      tok["parent"] = -1;
    } else if (row_is_one_hot(plan.parent_probs, a, hot) && hot >= 0) {
      tok["parent"] = hot;
    } else {
      tok["parent"] = std::vector<double>(plan.parent_probs.row(a).begin(),
                                          plan.parent_probs.row(a).end());
    }
    if (!plan.motif_atoms[a].empty())
      tok["atoms"] = plan.motif_atoms[a];
    tokens.push_back(std::move(tok));
  }
  return { { "num_types", plan.type_probs.cols() },
           { "tokens", std::move(tokens) },
           { "leaf_anchor", plan.leaf_anchor },
           { "mask", plan.mask } };
}

HierarchyPlan plan_from_json(const nlohmann::json &j) {
  const nlohmann::json &tokens = j.at("tokens");
  const int a_count = static_cast<int>(tokens.size());
  const int c_h = j.at("num_types").get<int>();

  HierarchyPlan plan;
  plan.type_probs = Eigen::MatrixXd::Zero(a_count, c_h);
  plan.parent_probs = Eigen::MatrixXd::Zero(a_count, a_count);
  plan.mask = j.at("mask").get<std::vector<bool>>();
  plan.leaf_anchor = j.at("leaf_anchor").get<std::vector<int>>();
  if (static_cast<int>(plan.mask.size()) != a_count)
    throw std::invalid_argument("plan mask size mismatch");

  for (int a = 0; a < a_count; ++a) {
    const nlohmann::json &tok = tokens[a];
    plan.kinds.push_back(token_kind_from_name(tok.at("kind").get<std::string>()));
    plan.motif_atoms.push_back(tok.value("atoms", std::vector<int> {}));

    if (tok.contains("type_probs")) {
      auto p = tok["type_probs"].get<std::vector<double>>();
      if (static_cast<int>(p.size()) != c_h)
        throw std::invalid_argument("type distribution size mismatch");
      plan.type_probs.row(a) = Eigen::Map<Eigen::RowVectorXd>(p.data(), c_h);
    } else {
      plan.type_probs(a, tok.at("type_id").get<int>()) = 1.0;
    }

    const nlohmann::json &par = tok.at("parent");
    if (par.is_array()) {
      auto p = par.get<std::vector<double>>();
      if (static_cast<int>(p.size()) != a_count)
        throw std::invalid_argument("parent distribution size mismatch");
      plan.parent_probs.row(a) =
          Eigen::Map<Eigen::RowVectorXd>(p.data(), a_count);
    } else if (const int b = par.get<int>(); b >= 0) {
      plan.parent_probs(a, b) = 1.0;
    }
  }
  return plan;
}

std::string describe_plan(const HierarchyPlan &plan,
                          const TokenVocabulary &vocab,
                          const ElementTable &table) {
  const std::vector<int> parents = plan.parents();
  const std::vector<int> types = plan.type_ids();
  std::vector<int> atom_of(plan.num_tokens(), -1);
  for (int i = 0; i < plan.num_atoms(); ++i)
    atom_of[plan.leaf_anchor[i]] = i;

  std::vector<std::vector<int>> children(plan.num_tokens());
  for (int a = 1; a < plan.num_tokens(); ++a) {
    if (plan.mask[a] && parents[a] >= 0)
      children[parents[a]].push_back(a);
  }

  std::ostringstream os;
  auto label = [&](int a) {
    std::ostringstream ls;
    ls << "[" << a << "] " << token_kind_name(plan.kinds[a]);
    if (plan.kinds[a] == TokenKind::kMotif) {
      const int type = types[a];
      if (type == vocab.unknown_type() || !vocab.is_motif_type(type))
        ls << " <unk>";
      else
        ls << " " << vocab.signatures()[type - vocab.unknown_type() - 1];
      ls << " atoms {";
      for (size_t k = 0; k < plan.motif_atoms[a].size(); ++k)
        ls << (k ? "," : "") << plan.motif_atoms[a][k];
      ls << "}";
    } else if (plan.kinds[a] == TokenKind::kLeaf && atom_of[a] >= 0) {
      const int elem = types[a] - 1;
      ls << " atom " << atom_of[a] << " "
         << (elem >= 0 && elem < table.size() ? table[elem].symbol : "?");
    }
    if (a > 0 && plan.parent_probs(a, parents[a]) < 1.0)
      ls << " p=" << fmt_prob(plan.parent_probs(a, parents[a]));
    return ls.str();
  };

  std::vector<std::pair<int, int>> stack { { 0, 0 } };
  while (!stack.empty()) {
    auto [a, depth] = stack.back();
    stack.pop_back();
    os << std::string(2 * depth, ' ') << label(a) << "\n";
    for (auto it = children[a].rbegin(); it != children[a].rend(); ++it)
      stack.emplace_back(*it, depth + 1);
  }
  return os.str();
}

}  // namespace hierflow
