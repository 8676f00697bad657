//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "commands.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hierflow/config.h"
#include "hierflow/gradcheck.h"
#include "hierflow/hierarchy.h"
#include "hierflow/library.h"
#include "hierflow/metrics.h"
#include "hierflow/pipeline.h"

namespace fs = std::filesystem;

namespace hierflow::cli {
namespace {
  RunConfig load_config(const std::string &path) {
    return path.empty() ? RunConfig {} : RunConfig::load(path);
  }

  void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
      throw IoError("write failed for " + path.string());
  }

  void ensure_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
      throw IoError("cannot create directory " + dir.string());
  }

  // Sorted *.json files of a directory, manifest and report excluded.
  std::vector<fs::path> molecule_files(const fs::path &dir) {
    if (!fs::is_directory(dir))
      throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto &entry: fs::directory_iterator(dir)) {
      const fs::path &p = entry.path();
      if (!entry.is_regular_file() || p.extension() != ".json")
        continue;
      if (p.filename() == "manifest.json" || p.filename() == "report.json")
        continue;
      files.push_back(p);
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw InputError("no molecule files in " + dir.string());
    return files;
  }

  Molecule read_molecule(const fs::path &path, const ElementTable &table) {
    if (!fs::exists(path))
      throw IoError("missing file " + path.string());
    try {
      return load_molecule(path, table);
    } catch (const nlohmann::json::exception &e) {
      throw InputError("malformed molecule " + path.string() + ": "
                       + e.what());
    }
  }

  std::string sample_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%05d.json", index);
    return buf;
  }
}  // namespace

int cmd_sample(const SampleArgs &a) {
  RunConfig cfg = load_config(a.config);
  if (a.steps)
    cfg.sampler.steps = *a.steps;
  if (!a.predictor.empty()) {
    cfg.predictor.kind = a.predictor == "oracle"    ? PredictorKind::kOracle
                         : a.predictor == "corrupted" ? PredictorKind::kCorrupted
                                                      : PredictorKind::kExternal;
  }
  cfg.sampler.chem = cfg.sampler.chem && !a.no_chem;
  cfg.sampler.cons = cfg.sampler.cons && !a.no_cons;
  cfg.sampler.geom = cfg.sampler.geom && !a.no_geom;
  cfg.sampler.repair = cfg.sampler.repair && !a.no_repair;
  cfg.validate();

  std::vector<Molecule> targets;
  std::vector<std::string> target_names;
  if (!a.targets.empty()) {
    for (const fs::path &p: molecule_files(a.targets)) {
      targets.push_back(read_molecule(p, cfg.elements));
      target_names.push_back(p.filename().string());
    }
  } else if (!cfg.predictor.targets.empty()) {
    for (const fs::path &p: cfg.predictor.targets) {
      targets.push_back(read_molecule(p, cfg.elements));
      target_names.push_back(p.filename().string());
    }
  } else {
    for (NamedMolecule &m: builtin_molecules(cfg.elements, cfg.bonds)) {
      targets.push_back(std::move(m.mol));
      target_names.push_back(m.name);
    }
  }

  const Pipeline pipeline(cfg, targets);
  const int threads = a.threads ? *a.threads : threads_from_env(1);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<SampleRecord> records =
      pipeline.run_batch(a.count, a.seed, threads);
  const double total_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();

  const fs::path out_dir(a.out);
  ensure_dir(out_dir / "samples");
  std::vector<ValidityReport> reports;
  std::vector<std::string> hashes;
  nlohmann::json rows = nlohmann::json::array();
  for (const SampleRecord &r: records) {
    nlohmann::json row = { { "index", r.index },
                           { "target", target_names[r.target] },
                           { "seed", r.seed },
                           { "status", r.ok ? "ok" : "failed" } };
    if (r.ok) {
      const std::string file = sample_name(r.index);
      write_text(out_dir / "samples" / file,
                 molecule_to_json(r.mol, cfg.elements).dump(2) + "\n");
      const ValidityReport v =
          check_validity(r.mol, cfg.elements, cfg.bonds, cfg.metrics);
      const ValidityReport raw =
          check_validity(r.raw, cfg.elements, cfg.bonds, cfg.metrics);
      reports.push_back(v);
      hashes.push_back(canonical_hash(r.mol));
      row["file"] = "samples/" + file;
      row["atoms"] = r.mol.size();
      row["deleted_bonds"] = r.deleted.size();
      row["valid_raw"] = raw.valid;
      row["validity"] = v.to_json();
      row["max_simplex_violation"] = r.max_simplex_violation;
    } else {
      row["error"] = r.error;
      reports.push_back(ValidityReport::failure());
      hashes.emplace_back();
    }
    rows.push_back(row);
  }

  nlohmann::json manifest = { { "tool", "hierflow" },
                              { "version", HIERFLOW_VERSION },
                              { "config_hash", config_hash(cfg) },
                              { "seed", a.seed },
                              { "count", a.count },
                              { "config", cfg.to_json() },
                              { "samples", rows },
                              { "summary", batch_stats(reports, hashes).to_json() } };
  if (a.timing)
    manifest["timing"] = { { "total_ms", total_ms },
                           { "ms_per_mol", total_ms / a.count },
                           { "threads", threads } };
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  const BatchStats stats = batch_stats(reports, hashes);
  std::cout << "samples " << stats.samples << "  valid "
            << std::setprecision(4) << stats.valid_rate() << "  valid&unique "
            << stats.valid_unique_rate() << "  failures " << stats.failures
            << "\n";
  return kOk;
}

int cmd_check(const CheckArgs &a) {
  const RunConfig cfg = load_config(a.config);
  std::optional<std::set<std::string>> registry;
  if (!a.registry.empty()) {
    if (!fs::exists(a.registry))
      throw IoError("missing registry " + a.registry);
    registry = load_hash_registry(a.registry);
  }
  std::vector<ValidityReport> reports;
  std::vector<std::string> hashes;
  nlohmann::json rows = nlohmann::json::array();
  for (const fs::path &p: molecule_files(a.in)) {
    const Molecule m = read_molecule(p, cfg.elements);
    reports.push_back(check_validity(m, cfg.elements, cfg.bonds, cfg.metrics));
    hashes.push_back(canonical_hash(m));
    nlohmann::json row = reports.back().to_json();
    row["file"] = p.filename().string();
    row["hash"] = hashes.back();
    rows.push_back(row);
  }
  const BatchStats stats =
      batch_stats(reports, hashes, registry ? &*registry : nullptr);
  nlohmann::json report = stats.to_json();
  report["molecules"] = rows;
  if (!a.report.empty())
    write_text(a.report, report.dump(2) + "\n");

  std::cout << "molecules " << stats.samples << "  valid "
            << std::setprecision(4) << stats.valid_rate() << "  valid&unique "
            << stats.valid_unique_rate();
  if (const auto nov = stats.novelty_rate())
    std::cout << "  novelty " << *nov;
  std::cout << "\n";
  for (const auto &[cause, pct]: stats.cause_percentages())
    std::cout << "  " << invalid_cause_name(cause) << ": " << pct << "%\n";
  return kOk;
}

int cmd_gradcheck(const GradcheckArgs &a) {
  const RunConfig cfg = load_config(a.config);
  const EnergyModel model(cfg.elements, cfg.bonds, cfg.energies);
  GradcheckOptions opts;
  opts.tolerance = a.tolerance;
  const GradcheckReport report =
      run_gradcheck_suite(model, a.samples, a.max_atoms, a.seed, opts);
  if (!a.report.empty())
    write_text(a.report, report.to_json().dump(2) + "\n");
  std::cout << "gradcheck: " << report.checks.size() << " blocks, max rel err "
            << std::scientific << std::setprecision(3) << report.max_rel_err()
            << (report.passed() ? "  PASS" : "  FAIL") << "\n";
  for (const BlockCheck &c: report.failures())
    std::cout << "  " << c.label << " rel err " << c.rel_err << "\n";
  return report.passed() ? kOk : kTestFailure;
}

int cmd_hierarchy(const HierarchyArgs &a) {
  const RunConfig cfg = load_config(a.config);
  const Molecule mol = read_molecule(a.in, cfg.elements);
  const TokenVocabulary vocab =
      build_vocabulary({ mol }, cfg.elements, cfg.hierarchy);
  const HierarchyPlan plan =
      build_hierarchy(mol, cfg.elements, cfg.hierarchy, vocab);
  const Eigen::MatrixXd pi = soft_ancestor_mask(plan);
  if (a.json) {
    nlohmann::json j = { { "plan", plan_to_json(plan) },
                         { "vocabulary", vocab.to_json() } };
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < pi.rows(); ++i) {
      std::vector<double> r(pi.cols());
      for (Eigen::Index k = 0; k < pi.cols(); ++k)
        r[k] = pi(i, k);
      rows.push_back(r);
    }
    j["ancestor_mask"] = rows;
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::cout << describe_plan(plan, vocab, cfg.elements);
  std::cout << "ancestor mask (atoms x tokens):\n";
  for (Eigen::Index i = 0; i < pi.rows(); ++i) {
    std::cout << "  " << std::setw(3) << i << ":";
    for (Eigen::Index k = 0; k < pi.cols(); ++k)
      std::cout << " " << std::fixed << std::setprecision(2) << pi(i, k);
    std::cout << "\n";
  }
  return kOk;
}

int cmd_metrics(const MetricsArgs &a) {
  const double rate = pp_conversion_rate(a.raw, a.processed);
  std::cout << "conversion rate " << std::fixed << std::setprecision(4) << rate
            << "\n";
  return kOk;
}

}  // namespace hierflow::cli
