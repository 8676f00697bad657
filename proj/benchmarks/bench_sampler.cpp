//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <benchmark/benchmark.h>

#include "hierflow/library.h"
#include "hierflow/pipeline.h"

namespace {

using namespace hierflow;

struct Fixture {
  RunConfig config;
  std::vector<Molecule> targets;

  explicit Fixture(bool guided) {
    config.sampler.chem = config.sampler.cons = config.sampler.geom = guided;
    config.predictor.kind = PredictorKind::kCorrupted;
    config.predictor.corruption.inflation_rate = 0.3;
    for (const auto &m: builtin_molecules(config.elements, config.bonds))
      targets.push_back(m.mol);
  }
};

void BM_Drift(benchmark::State &state) {
  const Fixture f(state.range(0) != 0);
  const Pipeline pipe(f.config, f.targets);
  const int target = static_cast<int>(f.targets.size()) - 1;
  const auto pred = pipe.predictor(target, 1);
  std::mt19937_64 rng(1);
  const RelaxedState x = sample_prior(pipe.priors(), pipe.vocabulary(), f.config.elements,
                                      f.config.bonds, f.config.hierarchy, rng,
                                      pred->size_hint());
  const EndpointPrediction p = pred->predict(x, 0.5);
  for (auto _: state)
    benchmark::DoNotOptimize(pipe.sampler().drift(x, p, 0.5));
}
BENCHMARK(BM_Drift)->Arg(0)->Arg(1);

void BM_Integrate(benchmark::State &state) {
  const Fixture f(state.range(0) != 0);
  const Pipeline pipe(f.config, f.targets);
  int k = 0;
  for (auto _: state)
    benchmark::DoNotOptimize(pipe.run(k++, 7));
}
BENCHMARK(BM_Integrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
