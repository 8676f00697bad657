//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_TOOLS_COMMANDS_H_
#define HIERFLOW_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace hierflow::cli {

enum ExitCode { kOk = 0, kTestFailure = 1, kConfigError = 2, kIoError = 3 };

class IoError: public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError: public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleArgs {
  std::string config;
  std::string out;
  std::string targets;
  std::string predictor;
  std::uint64_t seed = 0;
  int count = 10;
  std::optional<int> steps;
  std::optional<int> threads;
  bool timing = false;
  bool no_chem = false;
  bool no_cons = false;
  bool no_geom = false;
  bool no_repair = false;
};

struct CheckArgs {
  std::string config;
  std::string in;
  std::string report;
  std::string registry;
};

struct GradcheckArgs {
  std::string config;
  std::string report;
  int samples = 50;
  int max_atoms = 10;
  std::uint64_t seed = 0;
  double tolerance = 1e-5;
};

struct HierarchyArgs {
  std::string config;
  std::string in;
  bool json = false;
};

struct MetricsArgs {
  double raw = 0.0;
  double processed = 0.0;
};

int cmd_sample(const SampleArgs &args);
int cmd_check(const CheckArgs &args);
int cmd_gradcheck(const GradcheckArgs &args);
int cmd_hierarchy(const HierarchyArgs &args);
int cmd_metrics(const MetricsArgs &args);

}  // namespace hierflow::cli

#endif  // HIERFLOW_TOOLS_COMMANDS_H_
