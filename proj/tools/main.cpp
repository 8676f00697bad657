//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.h"
#include "hierflow/config.h"
#include "hierflow/error.h"

using namespace hierflow::cli;

int main(int argc, char **argv) {
  CLI::App app { "hierflow: hierarchy-guided molecular flow sampling" };
  app.set_version_flag("--version", HIERFLOW_VERSION);
  app.require_subcommand(1);

  SampleArgs sample;
  auto *s = app.add_subcommand("sample", "Integrate samples with a reference "
                                         "predictor");
  s->add_option("--config", sample.config, "Run configuration (JSON)");
  s->add_option("--out", sample.out, "Output directory")->required();
  s->add_option("--seed", sample.seed, "Master seed");
  s->add_option("--count", sample.count, "Number of samples")
      ->check(CLI::PositiveNumber);
  s->add_option("--targets", sample.targets,
                "Directory of target molecules (JSON)");
  s->add_option("--predictor", sample.predictor, "oracle, corrupted or "
                                                 "external")
      ->check(CLI::IsMember({ "oracle", "corrupted", "external" }));
  s->add_option("--steps", sample.steps, "Solver steps")
      ->check(CLI::PositiveNumber);
  s->add_option("--threads", sample.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  s->add_flag("--timing", sample.timing, "Record wall-clock statistics");
  s->add_flag("--no-chem", sample.no_chem, "Disable chemistry guidance");
  s->add_flag("--no-cons", sample.no_cons, "Disable consistency guidance");
  s->add_flag("--no-geom", sample.no_geom, "Disable geometry guidance");
  s->add_flag("--no-repair", sample.no_repair, "Skip valence repair");

  CheckArgs check;
  auto *c = app.add_subcommand("check", "Validity report for a directory of "
                                        "molecules");
  c->add_option("--in", check.in, "Directory of molecules (JSON)")->required();
  c->add_option("--config", check.config, "Run configuration (JSON)");
  c->add_option("--table", check.config, "Alias of --config");
  c->add_option("--report", check.report, "Write the report to this file");
  c->add_option("--registry", check.registry, "Hash registry for novelty");

  GradcheckArgs grad;
  auto *g = app.add_subcommand("gradcheck", "Finite-difference gradient "
                                            "suite");
  g->add_option("--config", grad.config, "Run configuration (JSON)");
  g->add_option("--samples", grad.samples, "Random states")
      ->check(CLI::PositiveNumber);
  g->add_option("--max-atoms", grad.max_atoms, "Largest state")
      ->check(CLI::Range(2, 64));
  g->add_option("--seed", grad.seed, "Seed");
  g->add_option("--tolerance", grad.tolerance, "Relative error bound");
  g->add_option("--report", grad.report, "Write the report to this file");

  HierarchyArgs hier;
  auto *h = app.add_subcommand("hierarchy", "Print the hierarchy plan of a "
                                            "molecule");
  h->add_option("--in", hier.in, "Molecule (JSON)")->required();
  h->add_option("--config", hier.config, "Run configuration (JSON)");
  h->add_flag("--json", hier.json, "Emit JSON instead of text");

  MetricsArgs metrics;
  auto *m = app.add_subcommand("metrics", "Post-processing conversion rate");
  m->add_option("--raw", metrics.raw, "Valid percentage before processing")
      ->required();
  m->add_option("--processed", metrics.processed,
                "Valid percentage after processing")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*s)
      return cmd_sample(sample);
    if (*c)
      return cmd_check(check);
    if (*g)
      return cmd_gradcheck(grad);
    if (*h)
      return cmd_hierarchy(hier);
    return cmd_metrics(metrics);
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const hierflow::ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const hierflow::BudgetError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
}
