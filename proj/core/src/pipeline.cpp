//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/pipeline.h"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "hierflow/error.h"

namespace hierflow {
namespace {
  TokenVocabulary make_vocab(const RunConfig &c,
                             const std::vector<Molecule> &targets) {
    return build_vocabulary(targets, c.elements, c.hierarchy);
  }

  PriorTables make_priors(const RunConfig &c,
                          const std::vector<Molecule> &targets) {
    if (c.priors)
      return *c.priors;
    return PriorTables::estimate(targets, c.elements, c.bonds, c.hierarchy);
  }
}  // namespace

Pipeline::Pipeline(RunConfig config, std::vector<Molecule> targets)
    : config_(std::move(config)), targets_(std::move(targets)),
      vocab_(make_vocab(config_, targets_)),
      priors_(make_priors(config_, targets_)),
      sampler_(EnergyModel(config_.elements, config_.bonds, config_.energies),
               config_.sampler, config_.hierarchy) {
  if (targets_.empty())
    throw ConfigError("no target molecules");
  for (const Molecule &m: targets_) {
    m.validate(config_.elements, config_.bonds);
    if (m.size() > config_.hierarchy.max_atoms)
      throw ConfigError("target exceeds hierarchy.max_atoms");
    if (!priors_.supports(m.size()))
      throw ConfigError("prior tables do not cover a target of "
                        + std::to_string(m.size()) + " atoms");
    OracleOptions o = config_.predictor.oracle;
    o.hyperbolic = config_.sampler.hyperbolic;
    oracles_.push_back(OraclePredictor::from_molecule(
        m, config_.elements, config_.bonds, config_.hierarchy, vocab_, o));
  }
}

std::shared_ptr<const EndpointPredictor>
Pipeline::predictor(int target, std::uint64_t seed) const {
  const PredictorConfig &p = config_.predictor;
  switch (p.kind) {
  case PredictorKind::kOracle:
    return oracles_.at(target);
  case PredictorKind::kCorrupted: {
    CorruptionOptions c = p.corruption;
    c.seed = derive_seed(seed, p.corruption.seed);
    return std::make_shared<CorruptedPredictor>(oracles_.at(target), c,
                                                config_.bonds);
  }
  case PredictorKind::kExternal:
    return std::make_shared<ExternalPredictor>(p.command, p.work_dir);
  }
  throw ConfigError("unknown predictor kind");
}

SampleRecord Pipeline::run(int index, std::uint64_t master) const {
  SampleRecord r;
  r.index = index;
  r.target = index % static_cast<int>(targets_.size());
  r.seed = derive_seed(master, static_cast<std::uint64_t>(index));
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto pred = predictor(r.target, r.seed);
    IntegrationResult res =
        sampler_.sample(priors_, vocab_, *pred, r.seed, {});
    r.max_simplex_violation = res.max_simplex_violation;
    Discretized d = discretize(res.final);
    r.raw = d.mol;
    if (config_.sampler.repair) {
      RepairResult rep =
          valence_repair(d.mol, d.confidence, config_.elements, config_.bonds);
      r.mol = std::move(rep.mol);
      r.deleted = std::move(rep.deleted);
    } else {
      r.mol = d.mol;
    }
    r.ok = true;
  } catch (const SolverError &e) {
    r.error = e.what();
  } catch (const NumericalError &e) {
    r.error = e.what();
  }
  r.millis = std::chrono::duration<double, std::milli>(
                 std::chrono::steady_clock::now() - start)
                 .count();
  return r;
}

std::vector<SampleRecord> Pipeline::run_batch(int count, std::uint64_t master,
                                              int threads) const {
  std::vector<SampleRecord> out(std::max(count, 0));
  if (config_.predictor.kind == PredictorKind::kExternal)
    threads = 1;
  threads = std::clamp(threads, 1, std::max(count, 1));
  std::atomic<int> next { 0 };
  auto worker = [&] {
    for (int k = next++; k < count; k = next++)
      out[k] = run(k, master);
  };
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back(worker);
  pool.clear();
  return out;
}

int threads_from_env(int fallback) {
  const char *v = std::getenv("HIERFLOW_THREADS");
  if (!v || !*v)
    return fallback;
  char *end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1)
    throw ConfigError("HIERFLOW_THREADS must be a positive integer");
  return static_cast<int>(std::min<long>(n, 256));
}

}  // namespace hierflow
