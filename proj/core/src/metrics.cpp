//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/metrics.h"

#include <fstream>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "hierflow/graph_hash.h"
#include "hierflow/rings.h"

namespace hierflow {
namespace {
  constexpr double kValenceSlack = 1e-9;

  // Atoms reachable from start, optionally skipping the edge (skip_u, skip_v).
  std::vector<bool> reachable(const Molecule &mol, int start,
                              const std::vector<bool> &allowed, int skip_u = -1,
                              int skip_v = -1) {
    std::vector<bool> seen(mol.size(), false);
    std::queue<int> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v: mol.neighbors(u)) {
        if (seen[v] || !allowed[v])
          continue;
        if ((u == skip_u && v == skip_v) || (u == skip_v && v == skip_u))
          continue;
        seen[v] = true;
        q.push(v);
      }
    }
    return seen;
  }

  bool is_connected(const Molecule &mol, const ElementTable &table,
                    bool include_h) {
    const int n = mol.size();
    if (n == 0)
      return false;
    std::vector<bool> allowed(n, true);
    if (!include_h) {
      bool any_heavy = false;
      for (int i = 0; i < n; ++i) {
        allowed[i] = table[mol.elements[i]].symbol != "H";
        any_heavy = any_heavy || allowed[i];
      }
      if (!any_heavy)
        allowed.assign(n, true);
    }
    int start = 0;
    while (!allowed[start])
      ++start;
    const std::vector<bool> seen = reachable(mol, start, allowed);
    for (int i = 0; i < n; ++i) {
      if (allowed[i] && !seen[i])
        return false;
    }
    return true;
  }

  bool rings_ok(const Molecule &mol, const BondOrders &orders) {
    for (const Ring &r: perceive_rings(mol)) {
      if (r.size() < 3)
        return false;
    }
    if (!orders.has_aromatic())
      return true;
    const int n = mol.size();
    const std::vector<bool> all(n, true);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (mol.bonds(i, j) != orders.aromatic_index())
          continue;
        if (!reachable(mol, i, all, i, j)[j])
          return false;
      }
    }
    return true;
  }

  bool geometry_ok(const Molecule &mol, const ElementTable &table,
                   const ValidityConfig &c) {
    const int n = mol.size();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double d = (mol.coords.row(i) - mol.coords.row(j)).norm();
        if (!std::isfinite(d))
          return false;
        if (mol.bonds(i, j) != 0) {
          if (d < c.bond_min || d > c.bond_max)
            return false;
        } else if (table[mol.elements[i]].symbol != "H"
                   && table[mol.elements[j]].symbol != "H" && d < c.clash) {
          return false;
        }
      }
    }
    return true;
  }
}  // namespace

std::string_view invalid_cause_name(InvalidCause cause) {
  switch (cause) {
  case InvalidCause::kValence:
    return "valence";
  case InvalidCause::kDisconnected:
    return "disconnected";
  case InvalidCause::kRingAromatic:
    return "ring_aromatic";
  case InvalidCause::kGeometry:
    return "geometry";
  case InvalidCause::kFailure:
    return "failure";
  }
  return "unknown";
}

nlohmann::json ValidityConfig::to_json() const {
  return { { "check_valence", check_valence },
           { "check_connected", check_connected },
           { "check_rings", check_rings },
           { "check_geometry", check_geometry },
           { "include_hydrogens", include_hydrogens },
           { "bond_min", bond_min },
           { "bond_max", bond_max },
           { "clash", clash } };
}

ValidityConfig ValidityConfig::from_json(const nlohmann::json &j) {
  ValidityConfig c;
  for (const auto &[key, v]: j.items()) {
    if (key == "check_valence")
      c.check_valence = v.get<bool>();
    else if (key == "check_connected")
      c.check_connected = v.get<bool>();
    else if (key == "check_rings")
      c.check_rings = v.get<bool>();
    else if (key == "check_geometry")
      c.check_geometry = v.get<bool>();
    else if (key == "include_hydrogens")
      c.include_hydrogens = v.get<bool>();
    else if (key == "bond_min")
      c.bond_min = v.get<double>();
    else if (key == "bond_max")
      c.bond_max = v.get<double>();
    else if (key == "clash")
      c.clash = v.get<double>();
    else
      throw std::invalid_argument("metrics: unknown key " + key);
  }
  if (!(c.bond_min >= 0.0 && c.bond_min <= c.bond_max && c.clash >= 0.0))
    throw std::invalid_argument("metrics: inconsistent geometry thresholds");
  return c;
}

ValidityReport ValidityReport::failure() {
  ValidityReport r;
  r.cause = InvalidCause::kFailure;
  return r;
}

nlohmann::json ValidityReport::to_json() const {
  nlohmann::json j = { { "valid", valid },
                       { "valence_ok", valence_ok },
                       { "connected", connected },
                       { "rings_plausible", rings_plausible },
                       { "geometry_ok", geometry_ok } };
  j["cause"] = cause ? nlohmann::json(std::string(invalid_cause_name(*cause)))
                     : nlohmann::json(nullptr);
  return j;
}

ValidityReport check_validity(const Molecule &mol, const ElementTable &table,
                              const BondOrders &orders,
                              const ValidityConfig &config) {
  ValidityReport r;
  r.valence_ok = true;
  for (int i = 0; i < mol.size(); ++i) {
    if (mol.bond_order_sum(i, orders)
        > table[mol.elements[i]].max_valence + kValenceSlack) {
      r.valence_ok = false;
      break;
    }
  }
  r.connected = is_connected(mol, table, config.include_hydrogens);
  r.rings_plausible = rings_ok(mol, orders);
  r.geometry_ok = geometry_ok(mol, table, config);

  if (config.check_valence && !r.valence_ok)
    r.cause = InvalidCause::kValence;
  else if (config.check_connected && !r.connected)
    r.cause = InvalidCause::kDisconnected;
  else if (config.check_rings && !r.rings_plausible)
    r.cause = InvalidCause::kRingAromatic;
  else if (config.check_geometry && !r.geometry_ok)
    r.cause = InvalidCause::kGeometry;
  r.valid = !r.cause.has_value();
  return r;
}

std::string canonical_hash(const Molecule &mol) {
  std::vector<std::string> labels;
  labels.reserve(mol.size());
  for (int e: mol.elements)
    labels.push_back(std::to_string(e));
  std::vector<LabeledEdge> edges;
  for (int i = 0; i < mol.size(); ++i) {
    for (int j = i + 1; j < mol.size(); ++j) {
      if (mol.bonds(i, j) != 0)
        edges.push_back({ i, j, mol.bonds(i, j) });
    }
  }
  return wl_graph_hash(labels, edges);
}

double BatchStats::valid_rate() const {
  return samples ? static_cast<double>(valid) / samples : 0.0;
}

double BatchStats::valid_unique_rate() const {
  return samples ? static_cast<double>(valid_unique) / samples : 0.0;
}

std::optional<double> BatchStats::novelty_rate() const {
  if (!novel)
    return std::nullopt;
  return valid ? static_cast<double>(*novel) / valid : 0.0;
}

std::map<InvalidCause, double> BatchStats::cause_percentages() const {
  std::map<InvalidCause, double> out;
  const int invalid = samples - valid;
  for (const auto &[cause, count]: causes)
    out[cause] = invalid ? 100.0 * count / invalid : 0.0;
  return out;
}

nlohmann::json BatchStats::to_json() const {
  nlohmann::json causes_j = nlohmann::json::object();
  for (const auto &[cause, pct]: cause_percentages())
    causes_j[std::string(invalid_cause_name(cause))] = {
      { "count", causes.at(cause) }, { "percent", pct }
    };
  nlohmann::json j = { { "samples", samples },
                       { "valid", valid },
                       { "valid_unique", valid_unique },
                       { "failures", failures },
                       { "valid_rate", valid_rate() },
                       { "valid_unique_rate", valid_unique_rate() },
                       { "causes", causes_j } };
  if (novel) {
    j["novel"] = *novel;
    j["novelty_rate"] = *novelty_rate();
  }
  return j;
}

BatchStats batch_stats(const std::vector<ValidityReport> &reports,
                       const std::vector<std::string> &hashes,
                       const std::set<std::string> *registry) {
  if (reports.empty())
    throw std::invalid_argument("batch_stats: empty batch");
  if (reports.size() != hashes.size())
    throw std::invalid_argument("batch_stats: reports and hashes differ in "
                                "length");
  BatchStats s;
  s.samples = static_cast<int>(reports.size());
  if (registry)
    s.novel = 0;
  std::unordered_set<std::string> seen;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const ValidityReport &r = reports[k];
    if (!r.valid) {
      const InvalidCause cause = r.cause.value_or(InvalidCause::kFailure);
      ++s.causes[cause];
      if (cause == InvalidCause::kFailure)
        ++s.failures;
      continue;
    }
    ++s.valid;
    if (seen.insert(hashes[k]).second)
      ++s.valid_unique;
    if (registry && !registry->count(hashes[k]))
      ++*s.novel;
  }
  return s;
}

std::set<std::string> load_hash_registry(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open hash registry " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#')
      continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.insert(line.substr(b, e - b + 1));
  }
  return out;
}

double pp_conversion_rate(double raw, double pp) {
  if (!(raw >= 0.0 && raw <= pp && pp <= 100.0))
    throw std::invalid_argument("pp_conversion_rate: need 0 <= raw <= "
                                "processed <= 100");
  if (raw >= 100.0)
    throw std::invalid_argument("pp_conversion_rate: undefined at raw = 100");
  return (pp - raw) / (100.0 - raw);
}

}  // namespace hierflow
