//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/priors.h"

#include <cmath>
#include <stdexcept>

namespace hierflow {
namespace {
  void check_distribution(const std::vector<double> &p, int width,
                          const std::string &what) {
    if (width >= 0 && static_cast<int>(p.size()) != width)
      throw std::invalid_argument(what + ": expected " + std::to_string(width)
                                  + " entries");
    double total = 0.0;
    for (double v: p) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument(what + ": negative or non-finite entry");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-6)
      throw std::invalid_argument(what + ": does not sum to 1");
  }

  std::vector<double> normalized(std::vector<double> v) {
    double total = 0.0;
    for (double x: v)
      total += x;
    if (total <= 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      v[0] = 1.0;
      return v;
    }
    for (double &x: v)
      x /= total;
    return v;
  }

  int draw(const std::vector<double> &p, std::mt19937_64 &rng) {
    std::discrete_distribution<int> dist(p.begin(), p.end());
    return dist(rng);
  }

  Eigen::RowVectorXd one_hot(int k, int width) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(width);
    v[k] = 1.0;
    return v;
  }

  Eigen::RowVectorXd clipped_logits(const Eigen::RowVectorXd &p, double clip) {
    return probs_to_logits(p.transpose(), clip).transpose();
  }

  nlohmann::json table_json(const std::map<int, std::vector<double>> &m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto &[n, p]: m)
      j[std::to_string(n)] = p;
    return j;
  }

  std::map<int, std::vector<double>> table_from(const nlohmann::json &j) {
    std::map<int, std::vector<double>> m;
    for (const auto &[n, p]: j.items())
      m[std::stoi(n)] = p.get<std::vector<double>>();
    return m;
  }
}  // namespace

bool PriorTables::supports(int n) const {
  return size.count(n) && atom_types.count(n) && bond_types.count(n)
         && motif_counts.count(n);
}

void PriorTables::validate(int num_atom_types, int num_bond_types) const {
  if (size.empty())
    throw std::invalid_argument("priors: empty size distribution");
  std::vector<double> sizes;
  for (const auto &[n, p]: size) {
    if (n < 1)
      throw std::invalid_argument("priors: atom counts must be positive");
    sizes.push_back(p);
    if (!supports(n))
      throw std::invalid_argument("priors: incomplete tables for N = "
                                  + std::to_string(n));
    check_distribution(atom_types.at(n), num_atom_types, "priors.atom_types");
    check_distribution(bond_types.at(n), num_bond_types, "priors.bond_types");
    check_distribution(motif_counts.at(n), -1, "priors.motif_counts");
  }
  check_distribution(sizes, -1, "priors.size");
  if (!motif_types.empty()) {
    std::vector<double> p;
    for (const auto &[_, v]: motif_types)
      p.push_back(v);
    check_distribution(p, -1, "priors.motif_types");
  }
  if (!(sigma_r > 0.0))
    throw std::invalid_argument("priors: sigma_r must be positive");
}

PriorTables PriorTables::estimate(const std::vector<Molecule> &mols,
                                  const ElementTable &table,
                                  const BondOrders &orders,
                                  const HierarchyConfig &config) {
  if (mols.empty())
    throw std::invalid_argument("priors: no molecules to estimate from");
  const int c_a = table.size();
  const int k = orders.size();

  std::map<int, double> size_counts;
  std::map<int, std::vector<double>> atoms, bonds, motifs;
  std::map<std::string, double> sigs;
  for (const Molecule &mol: mols) {
    const int n = mol.size();
    size_counts[n] += 1.0;
    auto &a = atoms.try_emplace(n, std::vector<double>(c_a, 0.0)).first->second;
    auto &b = bonds.try_emplace(n, std::vector<double>(k, 0.0)).first->second;
    auto &m = motifs.try_emplace(n, std::vector<double>(config.max_motifs + 1,
                                                        0.0))
                  .first->second;
    for (int e: mol.elements)
      a[e] += 1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j)
        b[mol.bonds(i, j)] += 1.0;
    }
    const MotifDecomposition d = decompose(mol, table, config);
    m[d.size()] += 1.0;
    for (const std::string &s: d.signatures)
      sigs[s] += 1.0;
  }

  PriorTables out;
  double total = 0.0;
  for (const auto &[n, c]: size_counts)
    total += c;
  for (const auto &[n, c]: size_counts) {
    out.size[n] = c / total;
    out.atom_types[n] = normalized(atoms[n]);
    out.bond_types[n] = normalized(bonds[n]);
    out.motif_counts[n] = normalized(motifs[n]);
  }
  double sig_total = 0.0;
  for (const auto &[_, c]: sigs)
    sig_total += c;
  for (const auto &[s, c]: sigs)
    out.motif_types[s] = c / sig_total;
  return out;
}

nlohmann::json PriorTables::to_json() const {
  nlohmann::json sizes = nlohmann::json::object();
  for (const auto &[n, p]: size)
    sizes[std::to_string(n)] = p;
  return { { "size", sizes },
           { "atom_types", table_json(atom_types) },
           { "bond_types", table_json(bond_types) },
           { "motif_counts", table_json(motif_counts) },
           { "motif_types", motif_types },
           { "sigma_r", sigma_r },
           { "mode", mode == PriorMode::kSampled ? "sampled" : "marginal" } };
}

PriorTables PriorTables::from_json(const nlohmann::json &j) {
  PriorTables t;
  for (const auto &[n, p]: j.at("size").items())
    t.size[std::stoi(n)] = p.get<double>();
  t.atom_types = table_from(j.at("atom_types"));
  t.bond_types = table_from(j.at("bond_types"));
  t.motif_counts = table_from(j.at("motif_counts"));
  if (j.contains("motif_types"))
    t.motif_types = j["motif_types"].get<std::map<std::string, double>>();
  t.sigma_r = j.value("sigma_r", 1.0);
  const std::string mode = j.value("mode", std::string("sampled"));
  if (mode == "sampled")
    t.mode = PriorMode::kSampled;
  else if (mode == "marginal")
    t.mode = PriorMode::kMarginal;
  else
    throw std::invalid_argument("priors.mode: unknown value " + mode);
  return t;
}

int leaf_token(int atom, int max_motifs) { return 1 + max_motifs + atom; }

RelaxedState sample_prior(const PriorTables &tables,
                          const TokenVocabulary &vocab,
                          const ElementTable &table, const BondOrders &orders,
                          const HierarchyConfig &config, std::mt19937_64 &rng,
                          const std::optional<SizeHint> &hint, double clip) {
  const int c_a = table.size();
  const int k = orders.size();
  const int c_h = vocab.size();
  const int m_max = config.max_motifs;

  int n = 0;
  if (hint && hint->atoms > 0) {
    n = hint->atoms;
  } else {
    std::vector<int> ns;
    std::vector<double> ps;
    for (const auto &[sz, p]: tables.size) {
      ns.push_back(sz);
      ps.push_back(p);
    }
    if (ns.empty())
      throw std::invalid_argument("priors: empty size distribution");
    n = ns[draw(ps, rng)];
  }
  if (!tables.supports(n))
    throw std::invalid_argument("priors: no tables for N = "
                                + std::to_string(n));
  if (n > config.max_atoms)
    throw std::invalid_argument("priors: N exceeds max_atoms");

  const std::vector<double> &atom_p = tables.atom_types.at(n);
  const std::vector<double> &bond_p = tables.bond_types.at(n);
  const std::vector<double> &count_p = tables.motif_counts.at(n);
  const bool soft = tables.mode == PriorMode::kMarginal;

  int m = 0;
  if (hint && hint->motifs >= 0)
    m = hint->motifs;
  else
    m = draw(count_p, rng);
  m = std::min(m, m_max);

  const int a_count = 1 + m_max + n;
  RelaxedState s = RelaxedState::zeros({ n, c_a, k, a_count, c_h });
  s.t = 0.0;
  s.atom_mask.assign(n, true);
  s.token_mask.assign(a_count, false);
  s.token_mask[0] = true;
  for (int a = 1; a <= m; ++a)
    s.token_mask[a] = true;
  for (int i = 0; i < n; ++i) {
    s.token_mask[leaf_token(i, m_max)] = true;
    s.leaf_anchor[i] = leaf_token(i, m_max);
  }

  const Eigen::RowVectorXd atom_marginal =
      Eigen::Map<const Eigen::RowVectorXd>(atom_p.data(), c_a);
  std::vector<int> elems(n);
  for (int i = 0; i < n; ++i) {
    elems[i] = draw(atom_p, rng);
    s.atom_logits.row(i) =
        clipped_logits(soft ? atom_marginal : one_hot(elems[i], c_a), clip);
  }

  const Eigen::RowVectorXd bond_marginal =
      Eigen::Map<const Eigen::RowVectorXd>(bond_p.data(), k);
  for (int p = 0; p < num_pairs(n); ++p) {
    const int b = draw(bond_p, rng);
    s.bond_logits.row(p) =
        clipped_logits(soft ? bond_marginal : one_hot(b, k), clip);
  }

  std::vector<std::string> sig_names;
  std::vector<double> sig_probs;
  for (const auto &[sig, p]: tables.motif_types) {
    sig_names.push_back(sig);
    sig_probs.push_back(p);
  }
  Eigen::RowVectorXd type_row = Eigen::RowVectorXd::Zero(c_h);
  for (int a = 0; a < a_count; ++a) {
    type_row.setZero();
    if (a == 0 || !s.token_mask[a]) {
      type_row[TokenVocabulary::kRootType] = 1.0;
    } else if (a <= m_max) {
      int type = vocab.unknown_type();
      if (!sig_names.empty())
        type = vocab.motif_type(sig_names[draw(sig_probs, rng)]);
      type_row[type] = 1.0;
    } else {
      const int i = a - 1 - m_max;
      if (soft)
        type_row.segment(1, c_a) = atom_marginal;
      else
        type_row[vocab.element_type(elems[i])] = 1.0;
    }
    s.type_logits.row(a) = clipped_logits(type_row, clip);
  }

  // Uniform parents: equal logits over valid entries.
  s.parent_logits.setZero();

  std::normal_distribution<double> normal(0.0, tables.sigma_r);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < 3; ++d)
      s.coords(i, d) = normal(rng);
  }
  s.coords = recenter(s.coords, s.atom_mask);
  s.refresh_probabilities();
  return s;
}

}  // namespace hierflow
