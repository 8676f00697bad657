//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_METRICS_H_
#define HIERFLOW_METRICS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hierflow/elements.h"
#include "hierflow/molecule.h"

namespace hierflow {

// Ordered by reporting priority.
enum class InvalidCause { kValence, kDisconnected, kRingAromatic, kGeometry,
                          kFailure };

std::string_view invalid_cause_name(InvalidCause cause);

struct ValidityConfig {
  bool check_valence = true;
  bool check_connected = true;
  bool check_rings = true;
  bool check_geometry = true;
  bool include_hydrogens = false;  // connectivity over all atoms
  double bond_min = 0.6;           // Å
  double bond_max = 2.2;
  double clash = 0.9;

  nlohmann::json to_json() const;
  static ValidityConfig from_json(const nlohmann::json &j);
};

struct ValidityReport {
  bool valence_ok = false;
  bool connected = false;
  bool rings_plausible = false;
  bool geometry_ok = false;
  bool valid = false;
  std::optional<InvalidCause> cause;

  // Report for a sample that produced no molecule.
  static ValidityReport failure();
  nlohmann::json to_json() const;
};

ValidityReport check_validity(const Molecule &mol, const ElementTable &table,
                              const BondOrders &orders,
                              const ValidityConfig &config = {});

// Permutation-invariant graph digest; coordinates are ignored.
std::string canonical_hash(const Molecule &mol);

struct BatchStats {
  int samples = 0;
  int valid = 0;
  int valid_unique = 0;
  int failures = 0;
  std::optional<int> novel;  // valid and absent from the registry
  std::map<InvalidCause, int> causes;

  double valid_rate() const;
  double valid_unique_rate() const;
  std::optional<double> novelty_rate() const;
  // Share of invalid samples per cause, in percent.
  std::map<InvalidCause, double> cause_percentages() const;
  nlohmann::json to_json() const;
};

/**
 * @brief Aggregate per-sample reports; hashes are parallel to reports and
 *        ignored for invalid entries.
 *
 * Throws std::invalid_argument for an empty batch or mismatched lengths.
 */
BatchStats batch_stats(const std::vector<ValidityReport> &reports,
                       const std::vector<std::string> &hashes,
                       const std::set<std::string> *registry = nullptr);

// One hash per line; blank lines and lines starting with '#' are skipped.
std::set<std::string> load_hash_registry(const std::filesystem::path &path);

/**
 * @brief Share of raw-invalid samples converted by post-processing.
 *
 * Percent inputs with 0 <= raw <= processed <= 100 and raw < 100.
 */
double pp_conversion_rate(double valid_raw, double valid_processed);

}  // namespace hierflow

#endif  // HIERFLOW_METRICS_H_
