//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace hierflow::testing {

Eigen::MatrixXd enumerate_ancestors(const Eigen::MatrixXd &rho,
                                    const std::vector<int> &leaf_anchor) {
  const int a_count = static_cast<int>(rho.rows());
  const int n = static_cast<int>(leaf_anchor.size());
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, a_count);
  std::vector<int> choice(a_count, -1);

  // Depth-first over parent assignments for tokens 1..A-1.
  auto visit = [&](auto &self, int a, double weight) -> void {
    if (a == a_count) {
      for (int i = 0; i < n; ++i) {
        for (int cur = leaf_anchor[i]; cur >= 0; cur = choice[cur])
          pi(i, cur) += weight;
      }
      return;
    }
    bool any = false;
    for (int b = 0; b < a; ++b) {
      if (rho(a, b) == 0.0)
        continue;
      any = true;
      choice[a] = b;
      self(self, a + 1, weight * rho(a, b));
    }
    if (!any) {
      choice[a] = -1;
      self(self, a + 1, weight);
    }
  };
  choice[0] = -1;
  visit(visit, 1, 1.0);
  return pi;
}

RandomPlan random_causal_plan(std::mt19937_64 &rng, int tokens, int leaves,
                              double sparsity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomPlan out;
  out.parent_probs = Eigen::MatrixXd::Zero(tokens, tokens);
  for (int a = 1; a < tokens; ++a) {
    double total = 0.0;
    for (int b = 0; b < a; ++b) {
      if (b > 0 && unit(rng) < sparsity)
        continue;
      out.parent_probs(a, b) = unit(rng) + 1e-3;
      total += out.parent_probs(a, b);
    }
    out.parent_probs.row(a) /= total;
  }
  std::uniform_int_distribution<int> tok(0, tokens - 1);
  for (int i = 0; i < leaves; ++i)
    out.leaf_anchor.push_back(tok(rng));
  return out;
}

std::vector<std::vector<int>>
merge_overlapping(std::vector<std::vector<int>> sets) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < sets.size() && !changed; ++a) {
      for (std::size_t b = a + 1; b < sets.size() && !changed; ++b) {
        std::set<int> sa(sets[a].begin(), sets[a].end());
        const bool overlap = std::any_of(sets[b].begin(), sets[b].end(),
                                         [&](int x) { return sa.count(x); });
        if (!overlap)
          continue;
        sa.insert(sets[b].begin(), sets[b].end());
        sets[a].assign(sa.begin(), sa.end());
        sets.erase(sets.begin() + static_cast<long>(b));
        changed = true;
      }
    }
  }
  for (auto &s: sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  std::sort(sets.begin(), sets.end());
  return sets;
}

std::vector<std::pair<int, int>>
reference_repair(Molecule &mol, const Eigen::MatrixXd &conf,
                 const ElementTable &table, const BondOrders &orders) {
  std::vector<std::pair<int, int>> trace;
  const int n = mol.size();
  for (int i = 0; i < n; ++i) {
    const double cap = table[mol.elements[i]].max_valence;
    std::vector<int> ranked;
    for (int j = 0; j < n; ++j) {
      if (j != i && mol.bonds(i, j) != 0)
        ranked.push_back(j);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](int a, int b) {
      if (conf(i, a) != conf(i, b))
        return conf(i, a) < conf(i, b);
      return a < b;
    });
    std::size_t next = 0;
    auto degree = [&] {
      double d = 0.0;
      for (int j = 0; j < n; ++j)
        d += orders[mol.bonds(i, j)];
      return d;
    };
    while (degree() > cap + 1e-9 && next < ranked.size()) {
      const int j = ranked[next++];
      mol.bonds(i, j) = mol.bonds(j, i) = 0;
      trace.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  return trace;
}

double dense_lambda2(const Eigen::MatrixXd &w) {
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd lap = -w;
  lap.diagonal().setZero();
  for (int i = 0; i < n; ++i)
    lap(i, i) = w.row(i).sum() - w(i, i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  return es.eigenvalues()[1];
}

double sign_test_p(int wins, int losses) {
  const int m = wins + losses;
  if (m == 0)
    return 1.0;
  double p = 0.0;
  for (int k = wins; k <= m; ++k)
    p += std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0)
                  - std::lgamma(m - k + 1.0) - m * std::log(2.0));
  return std::min(1.0, p);
}

}  // namespace hierflow::testing
