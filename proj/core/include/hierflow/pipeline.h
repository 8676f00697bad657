//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_PIPELINE_H_
#define HIERFLOW_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hierflow/config.h"
#include "hierflow/metrics.h"
#include "hierflow/sampler.h"

namespace hierflow {

struct SampleRecord {
  int index = 0;
  int target = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Molecule raw;   // discretized, before repair
  Molecule mol;   // after repair when enabled
  std::vector<std::pair<int, int>> deleted;
  double max_simplex_violation = 0.0;
  double millis = 0.0;
};

/**
 * @brief Reference-predictor sampling run over a fixed target set.
 *
 * Sample k uses target k mod |targets| and the seed derive_seed(master, k),
 * so results do not depend on the number of worker threads.
 */
class Pipeline {
 public:
  Pipeline(RunConfig config, std::vector<Molecule> targets);

  const RunConfig &config() const { return config_; }
  const TokenVocabulary &vocabulary() const { return vocab_; }
  const PriorTables &priors() const { return priors_; }
  const Sampler &sampler() const { return sampler_; }
  const std::vector<Molecule> &targets() const { return targets_; }

  std::shared_ptr<const EndpointPredictor> predictor(int target,
                                                     std::uint64_t seed) const;

  SampleRecord run(int index, std::uint64_t master_seed) const;
  std::vector<SampleRecord> run_batch(int count, std::uint64_t master_seed,
                                      int threads = 1) const;

 private:
  RunConfig config_;
  std::vector<Molecule> targets_;
  TokenVocabulary vocab_;
  PriorTables priors_;
  Sampler sampler_;
  std::vector<std::shared_ptr<const OraclePredictor>> oracles_;
};

// Worker count from HIERFLOW_THREADS, falling back to @p fallback.
int threads_from_env(int fallback = 1);

}  // namespace hierflow

#endif  // HIERFLOW_PIPELINE_H_
