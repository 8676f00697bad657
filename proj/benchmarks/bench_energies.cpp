//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <random>

#include <benchmark/benchmark.h>

#include "hierflow/energies.h"
#include "hierflow/gradcheck.h"

namespace {

using namespace hierflow;

void BM_EnergyTerm(benchmark::State &state) {
  const auto term = static_cast<EnergyTerm>(state.range(1));
  const EnergyModel model(ElementTable::defaults(), BondOrders::with_aromatic(),
                          EnergyConfig {});
  std::mt19937_64 rng(3);
  RandomStateOptions opts;
  opts.atoms = static_cast<int>(state.range(0));
  const RelaxedState s = random_relaxed_state(rng, opts);
  const EnergyInputs in = random_energy_inputs(rng, s);
  StateGradient g;
  for (auto _: state)
    benchmark::DoNotOptimize(model.term(term, s, in, &g));
  state.SetLabel(std::string(energy_term_name(term)));
}
BENCHMARK(BM_EnergyTerm)
    ->ArgsProduct({ { 12, 24 },
                    { static_cast<int>(EnergyTerm::kValence),
                      static_cast<int>(EnergyTerm::kConnLogdet),
                      static_cast<int>(EnergyTerm::kConnLambda2),
                      static_cast<int>(EnergyTerm::kConsistency),
                      static_cast<int>(EnergyTerm::kSteric) } });

void BM_Evaluate(benchmark::State &state) {
  const EnergyModel model(ElementTable::defaults(), BondOrders::with_aromatic(),
                          EnergyConfig {});
  std::mt19937_64 rng(4);
  RandomStateOptions opts;
  opts.atoms = static_cast<int>(state.range(0));
  const RelaxedState s = random_relaxed_state(rng, opts);
  const EnergyInputs in = random_energy_inputs(rng, s);
  for (auto _: state)
    benchmark::DoNotOptimize(model.evaluate(s, in));
}
BENCHMARK(BM_Evaluate)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
