//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <random>

#include <benchmark/benchmark.h>

#include "hierflow/hierarchy.h"
#include "hierflow/library.h"

namespace {

using namespace hierflow;

void BM_SoftAncestorMask(benchmark::State &state) {
  const int a = static_cast<int>(state.range(0));
  const int leaves = a / 2;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(a, a);
  for (int i = 1; i < a; ++i)
    for (int j = 0; j < i; ++j)
      rho(i, j) = u(rng);
  rho = causal_renormalize(rho, std::vector<bool>(a, true));
  std::vector<int> anchor(leaves);
  for (int i = 0; i < leaves; ++i)
    anchor[i] = a - leaves + i;
  for (auto _: state)
    benchmark::DoNotOptimize(soft_ancestor_mask(rho, anchor));
}
BENCHMARK(BM_SoftAncestorMask)->Arg(16)->Arg(32)->Arg(64);

void BM_BuildHierarchy(benchmark::State &state) {
  const ElementTable table = ElementTable::defaults();
  const BondOrders orders = BondOrders::with_aromatic();
  const HierarchyConfig cfg;
  std::vector<Molecule> mols;
  for (const auto &m: builtin_molecules(table, orders))
    mols.push_back(m.mol);
  const TokenVocabulary vocab = build_vocabulary(mols, table, cfg);
  for (auto _: state)
    for (const Molecule &m: mols)
      benchmark::DoNotOptimize(build_hierarchy(m, table, cfg, vocab));
}
BENCHMARK(BM_BuildHierarchy);

}  // namespace
