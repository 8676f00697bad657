//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/config.h"

#include <cstdio>
#include <fstream>

#include "hierflow/graph_hash.h"

namespace hierflow {
namespace {
  std::string_view predictor_kind_name(PredictorKind k) {
    switch (k) {
    case PredictorKind::kOracle:
      return "oracle";
    case PredictorKind::kCorrupted:
      return "corrupted";
    case PredictorKind::kExternal:
      return "external";
    }
    return "oracle";
  }

  PredictorKind predictor_kind_from_name(const std::string &s) {
    for (PredictorKind k: { PredictorKind::kOracle, PredictorKind::kCorrupted,
                            PredictorKind::kExternal }) {
      if (predictor_kind_name(k) == s)
        return k;
    }
    throw std::invalid_argument("unknown predictor kind " + s);
  }

  nlohmann::json bonds_to_json(const BondOrders &b) {
    return { { "orders", b.orders() }, { "aromatic_index", b.aromatic_index() } };
  }

  BondOrders bonds_from_json(const nlohmann::json &j) {
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      if (s == "aromatic")
        return BondOrders::with_aromatic();
      if (s == "kekule")
        return BondOrders::without_aromatic();
      throw std::invalid_argument("bonds: expected 'aromatic' or 'kekule'");
    }
    std::vector<double> orders;
    int aromatic = -1;
    for (const auto &[key, v]: j.items()) {
      if (key == "orders")
        orders = v.get<std::vector<double>>();
      else if (key == "aromatic_index")
        aromatic = v.get<int>();
      else
        throw std::invalid_argument("bonds: unknown key " + key);
    }
    return BondOrders(orders, aromatic);
  }

  nlohmann::json predictor_to_json(const PredictorConfig &p) {
    nlohmann::json targets = nlohmann::json::array();
    for (const auto &t: p.targets)
      targets.push_back(t.string());
    const OracleOptions &o = p.oracle;
    const CorruptionOptions &c = p.corruption;
    return { { "kind", predictor_kind_name(p.kind) },
             { "targets", targets },
             { "clip", o.clip },
             { "emit_hyperbolic", o.emit_hyperbolic },
             { "group_radius", o.group_radius },
             { "leaf_spread", o.leaf_spread },
             { "seed", o.seed },
             { "corruption",
               { { "inflation_rate", c.inflation_rate },
                 { "spurious_rate", c.spurious_rate },
                 { "dropout_rate", c.dropout_rate },
                 { "coord_noise", c.coord_noise },
                 { "bias", c.bias },
                 { "feedback", c.feedback },
                 { "clamp", c.clamp },
                 { "seed", c.seed } } },
             { "command", p.command },
             { "work_dir", p.work_dir } };
  }

  CorruptionOptions corruption_from_json(const nlohmann::json &j) {
    CorruptionOptions c;
    for (const auto &[key, v]: j.items()) {
      if (key == "inflation_rate")
        c.inflation_rate = v.get<double>();
      else if (key == "spurious_rate")
        c.spurious_rate = v.get<double>();
      else if (key == "dropout_rate")
        c.dropout_rate = v.get<double>();
      else if (key == "coord_noise")
        c.coord_noise = v.get<double>();
      else if (key == "bias")
        c.bias = v.get<double>();
      else if (key == "feedback")
        c.feedback = v.get<double>();
      else if (key == "clamp")
        c.clamp = v.get<double>();
      else if (key == "seed")
        c.seed = v.get<std::uint64_t>();
      else
        throw std::invalid_argument("predictor.corruption: unknown key " + key);
    }
    return c;
  }

  PredictorConfig predictor_from_json(const nlohmann::json &j,
                                      const std::filesystem::path &base) {
    PredictorConfig p;
    for (const auto &[key, v]: j.items()) {
      if (key == "kind")
        p.kind = predictor_kind_from_name(v.get<std::string>());
      else if (key == "targets") {
        for (const auto &t: v) {
          std::filesystem::path path = t.get<std::string>();
          p.targets.push_back(path.is_relative() && !base.empty() ? base / path
                                                                  : path);
        }
      } else if (key == "clip")
        p.oracle.clip = v.get<double>();
      else if (key == "emit_hyperbolic")
        p.oracle.emit_hyperbolic = v.get<bool>();
      else if (key == "group_radius")
        p.oracle.group_radius = v.get<double>();
      else if (key == "leaf_spread")
        p.oracle.leaf_spread = v.get<double>();
      else if (key == "seed")
        p.oracle.seed = v.get<std::uint64_t>();
      else if (key == "corruption")
        p.corruption = corruption_from_json(v);
      else if (key == "command")
        p.command = v.get<std::string>();
      else if (key == "work_dir")
        p.work_dir = v.get<std::string>();
      else
        throw std::invalid_argument("predictor: unknown key " + key);
    }
    return p;
  }
}  // namespace

nlohmann::json hierarchy_config_to_json(const HierarchyConfig &c) {
  return { { "mode", fragmentation_mode_name(c.mode) },
           { "max_motifs", c.max_motifs },
           { "max_atoms", c.max_atoms } };
}

HierarchyConfig hierarchy_config_from_json(const nlohmann::json &j) {
  HierarchyConfig c;
  for (const auto &[key, v]: j.items()) {
    if (key == "mode")
      c.mode = fragmentation_mode_from_name(v.get<std::string>());
    else if (key == "max_motifs")
      c.max_motifs = v.get<int>();
    else if (key == "max_atoms")
      c.max_atoms = v.get<int>();
    else
      throw std::invalid_argument("hierarchy: unknown key " + key);
  }
  if (c.max_motifs < 0 || c.max_atoms < 1)
    throw std::invalid_argument("hierarchy: budgets must be positive");
  return c;
}

void RunConfig::validate() const {
  try {
    if (elements.size() < 1)
      throw std::invalid_argument("elements: table is empty");
    if (bonds.size() < 2)
      throw std::invalid_argument("bonds: need at least two categories");
    if (static_cast<int>(energies.length_factors.size()) != bonds.size())
      throw std::invalid_argument(
          "energies.length_factors must have one entry per bond category");
    energies.validate();
    sampler.validate();
    if (priors)
      priors->validate(elements.size(), bonds.size());
    if (predictor.kind == PredictorKind::kExternal && predictor.command.empty())
      throw std::invalid_argument("predictor.command is required for external "
                                  "predictors");
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["elements"] = nlohmann::json::parse(elements.to_json().dump());
  j["bonds"] = bonds_to_json(bonds);
  j["hierarchy"] = hierarchy_config_to_json(hierarchy);
  j["energies"] = energies.to_json();
  j["sampler"] = sampler.to_json();
  if (priors)
    j["priors"] = priors->to_json();
  j["predictor"] = predictor_to_json(predictor);
  j["metrics"] = metrics.to_json();
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json &j,
                               const std::filesystem::path &base) {
  if (!j.is_object())
    throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  try {
    for (const auto &[key, v]: j.items()) {
      if (key == "elements") {
        c.elements = ElementTable::from_json(
            nlohmann::ordered_json::parse(v.dump()), true);
      } else if (key == "bonds")
        c.bonds = bonds_from_json(v);
      else if (key == "hierarchy")
        c.hierarchy = hierarchy_config_from_json(v);
      else if (key == "energies")
        c.energies = EnergyConfig::from_json(v);
      else if (key == "sampler")
        c.sampler = SamplerConfig::from_json(v);
      else if (key == "priors") {
        if (v.is_object() && v.size() == 1 && v.contains("path")) {
          std::filesystem::path p = v["path"].get<std::string>();
          if (p.is_relative() && !base.empty())
            p = base / p;
          std::ifstream in(p);
          if (!in)
            throw std::invalid_argument("cannot open prior tables " + p.string());
          c.priors = PriorTables::from_json(nlohmann::json::parse(in));
        } else
          c.priors = PriorTables::from_json(v);
      } else if (key == "predictor")
        c.predictor = predictor_from_json(v, base);
      else if (key == "metrics")
        c.metrics = ValidityConfig::from_json(v);
      else
        throw std::invalid_argument("unknown configuration section " + key);
    }
    if (!j.contains("energies") || !j["energies"].contains("length_factors"))
      if (c.bonds.size() != static_cast<int>(c.energies.length_factors.size()))
        c.energies.length_factors.resize(c.bonds.size(), 1.0);
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open configuration " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("malformed configuration " + path.string() + ": "
                      + e.what());
  }
  return from_json(j, path.parent_path());
}

std::string config_hash(const RunConfig &config) {
  const std::uint64_t h = hash_bytes(config.to_json().dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hierflow
