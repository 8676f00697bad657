//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/predictors.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace hierflow {
namespace {
  nlohmann::json mat_json(const Eigen::MatrixXd &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < m.cols(); ++c)
        row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  }

  Eigen::MatrixXd mat_from(const nlohmann::json &j, int cols = -1) {
    const int rows = static_cast<int>(j.size());
    if (rows == 0)
      return Eigen::MatrixXd(0, std::max(cols, 0));
    const int c = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, c);
    for (int r = 0; r < rows; ++r) {
      if (static_cast<int>(j[r].size()) != c)
        throw std::invalid_argument("ragged matrix in JSON");
      for (int k = 0; k < c; ++k)
        m(r, k) = j[r][k].get<double>();
    }
    return m;
  }

  Eigen::RowVectorXd clipped_row(int hot, int width, double clip) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(width);
    p[hot] = 1.0;
    return probs_to_logits(p, clip).transpose();
  }

  Eigen::RowVector3d centroid(const Eigen::MatrixX3d &x,
                              const std::vector<bool> &mask) {
    Eigen::RowVector3d c = Eigen::RowVector3d::Zero();
    int count = 0;
    for (int i = 0; i < x.rows(); ++i) {
      if (mask.empty() || mask[i]) {
        c += x.row(i);
        ++count;
      }
    }
    return count > 0 ? Eigen::RowVector3d(c / count) : c;
  }

  std::string shell_quote(const std::string &s) {
    std::string out = "'";
    for (char ch: s) {
      if (ch == '\'')
        out += "'\\''";
      else
        out += ch;
    }
    return out + "'";
  }
}  // namespace

bool EndpointPrediction::all_finite() const {
  return atom_logits.allFinite() && bond_logits.allFinite()
         && type_logits.allFinite() && parent_logits.allFinite()
         && coords.allFinite() && token_hyperbolic.allFinite();
}

RelaxedState target_state(const Molecule &mol, const HierarchyPlan &padded,
                          int num_atom_types, int num_bond_types,
                          double clip) {
  const int n = mol.size();
  const int a_count = padded.num_tokens();
  const int c_h = static_cast<int>(padded.type_probs.cols());
  if (padded.num_atoms() != n)
    throw std::invalid_argument("target_state: plan does not match molecule");

  RelaxedState s =
      RelaxedState::zeros({ n, num_atom_types, num_bond_types, a_count, c_h });
  s.atom_mask.assign(n, true);
  s.token_mask = padded.mask;
  s.leaf_anchor = padded.leaf_anchor;
  s.coords = mol.coords;

  for (int i = 0; i < n; ++i)
    s.atom_logits.row(i) = clipped_row(mol.elements[i], num_atom_types, clip);
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p)
      s.bond_logits.row(p) = clipped_row(mol.bonds(i, j), num_bond_types, clip);
  }

  const std::vector<int> types = padded.type_ids();
  const std::vector<int> parents = padded.parents();
  for (int a = 0; a < a_count; ++a) {
    s.type_logits.row(a) = clipped_row(types[a], c_h, clip);
    if (a == 0)
      continue;
    const int par = parents[a] < 0 ? 0 : parents[a];
    for (int b = 0; b < a; ++b) {
      if (s.parent_valid(a, b))
        s.parent_logits(a, b) = std::log(b == par ? 1.0 - clip : clip);
    }
  }
  s.refresh_probabilities();
  return s;
}

/* OraclePredictor */

OraclePredictor::OraclePredictor(Molecule target, HierarchyPlan padded_plan,
                                 int num_atom_types, int num_bond_types,
                                 OracleOptions opts)
    : target_(std::move(target)), plan_(std::move(padded_plan)) {
  logits_ = target_state(target_, plan_, num_atom_types, num_bond_types,
                         opts.clip);
  centered_ = recenter(target_.coords);

  const int a_count = plan_.num_tokens();
  const int dim = opts.hyperbolic.dim;
  if (!opts.emit_hyperbolic || dim <= 0)
    return;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int c_h = static_cast<int>(plan_.type_probs.cols());
  Eigen::MatrixXd type_dirs(dim, c_h);
  for (int c = 0; c < c_h; ++c) {
    for (int d = 0; d < dim; ++d)
      type_dirs(d, c) = normal(rng);
  }
  Eigen::MatrixXd pos_dirs(dim, a_count);
  for (int a = 0; a < a_count; ++a) {
    for (int d = 0; d < dim; ++d)
      pos_dirs(d, a) = normal(rng);
  }

  const std::vector<int> types = plan_.type_ids();
  const std::vector<int> parents = plan_.parents();
  Eigen::MatrixXd tangent = Eigen::MatrixXd::Zero(a_count, dim);
  hyperbolic_ = Eigen::MatrixXd::Zero(a_count, dim);
  for (int a = 1; a < a_count; ++a) {
    if (!plan_.mask[a])
      continue;
    Eigen::VectorXd dir = type_dirs.col(types[a]) + pos_dirs.col(a);
    dir.normalize();
    const int par = std::max(parents[a], 0);
    const bool under_motif = par > 0 && plan_.kinds[a] == TokenKind::kLeaf;
    const double len = under_motif ? opts.leaf_spread : opts.group_radius;
    tangent.row(a) = tangent.row(par) + len * dir.transpose();
    hyperbolic_.row(a) =
        exp_map_origin(tangent.row(a).transpose(), opts.hyperbolic.curvature)
            .transpose();
  }
}

std::shared_ptr<OraclePredictor>
OraclePredictor::from_molecule(const Molecule &mol, const ElementTable &table,
                               const BondOrders &orders,
                               const HierarchyConfig &config,
                               const TokenVocabulary &vocab,
                               OracleOptions opts) {
  HierarchyPlan plan = build_hierarchy(mol, table, config, vocab);
  HierarchyPlan padded = pad_plan(plan, config.max_motifs, mol.size());
  return std::make_shared<OraclePredictor>(mol, std::move(padded),
                                           table.size(), orders.size(), opts);
}

EndpointPrediction OraclePredictor::predict(const RelaxedState &state,
                                            double /*t*/) const {
  if (state.num_atoms() != logits_.num_atoms()
      || state.num_tokens() != logits_.num_tokens()
      || state.type_logits.cols() != logits_.type_logits.cols()
      || state.bond_logits.cols() != logits_.bond_logits.cols())
    throw std::invalid_argument("oracle: state layout does not match target");

  EndpointPrediction pred;
  pred.atom_logits = logits_.atom_logits;
  pred.bond_logits = logits_.bond_logits;
  pred.type_logits = logits_.type_logits;
  pred.parent_logits = logits_.parent_logits;
  pred.coords = centered_;
  pred.coords.rowwise() += centroid(state.coords, state.atom_mask);
  pred.token_hyperbolic = hyperbolic_;
  return pred;
}

std::optional<SizeHint> OraclePredictor::size_hint() const {
  return SizeHint { target_.size(), plan_.num_motifs() };
}

/* CorruptedPredictor */

CorruptedPredictor::CorruptedPredictor(
    std::shared_ptr<const OraclePredictor> oracle,
    const CorruptionOptions &opts, const BondOrders &orders)
    : oracle_(std::move(oracle)), opts_(opts) {
  const Molecule &mol = oracle_->target();
  const int n = mol.size();
  const int k = orders.size();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      const double u = unif(rng);
      const int a = mol.bonds(i, j);
      if (a == 0) {
        if (u < opts.spurious_rate)
          defects_.push_back({ p, 0, 1 });
        continue;
      }
      if (u < opts.dropout_rate) {
        defects_.push_back({ p, a, 0 });
        continue;
      }
      const bool raisable = a + 1 < k && a != orders.aromatic_index()
                            && a + 1 != orders.aromatic_index();
      if (raisable && u < opts.dropout_rate + opts.inflation_rate)
        defects_.push_back({ p, a, a + 1 });
    }
  }

  coord_offset_ = Eigen::MatrixX3d::Zero(n, 3);
  if (opts.coord_noise > 0.0) {
    std::normal_distribution<double> normal(0.0, opts.coord_noise);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 3; ++d)
        coord_offset_(i, d) = normal(rng);
    }
    coord_offset_ = recenter(coord_offset_);
  }
}

EndpointPrediction CorruptedPredictor::predict(const RelaxedState &state,
                                               double t) const {
  EndpointPrediction pred = oracle_->predict(state, t);
  for (const BondDefect &d: defects_) {
    const double diff = state.bond_logits(d.pair, d.corrupt_category)
                        - state.bond_logits(d.pair, d.true_category);
    const double rel =
        opts_.bias
        + opts_.feedback * std::clamp(diff, -opts_.clamp, opts_.clamp);
    pred.bond_logits(d.pair, d.corrupt_category) =
        pred.bond_logits(d.pair, d.true_category) + rel;
  }
  pred.coords += coord_offset_;
  return pred;
}

/* InterpolatingPredictor */

InterpolatingPredictor::InterpolatingPredictor(RelaxedState prior,
                                               double clip)
    : prior_(std::move(prior)), clip_(clip) { }

EndpointPrediction InterpolatingPredictor::predict(const RelaxedState &state,
                                                   double t) const {
  EndpointPrediction pred;
  if (t <= 1e-12) {
    pred.atom_logits = prior_.atom_logits;
    pred.bond_logits = prior_.bond_logits;
    pred.type_logits = prior_.type_logits;
    pred.parent_logits = prior_.parent_logits;
    pred.coords = prior_.coords;
    return pred;
  }

  auto invert = [&](const Eigen::MatrixXd &xt, const Eigen::MatrixXd &x0,
                    const std::vector<std::vector<bool>> &valid) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(xt.rows(), xt.cols());
    for (int r = 0; r < xt.rows(); ++r) {
      Eigen::VectorXd x1 = ((xt.row(r) - (1.0 - t) * x0.row(r)) / t).transpose();
      double total = 0.0;
      for (int c = 0; c < x1.size(); ++c) {
        const bool ok = valid.empty() || valid[r][c];
        x1[c] = ok ? std::max(x1[c], clip_) : 0.0;
        total += x1[c];
      }
      if (total <= 0.0)
        continue;
      for (int c = 0; c < x1.size(); ++c) {
        if (valid.empty() || valid[r][c])
          z(r, c) = std::log(x1[c] / total);
      }
    }
    return z;
  };

  pred.atom_logits = invert(state.atom_probs, prior_.atom_probs, {});
  pred.bond_logits = invert(state.bond_probs, prior_.bond_probs, {});
  pred.type_logits = invert(state.type_probs, prior_.type_probs, {});
  const int a_count = state.num_tokens();
  std::vector<std::vector<bool>> valid(a_count, std::vector<bool>(a_count));
  for (int a = 0; a < a_count; ++a) {
    for (int b = 0; b < a_count; ++b)
      valid[a][b] = state.parent_valid(a, b);
  }
  pred.parent_logits = invert(state.parent_probs, prior_.parent_probs, valid);
  pred.coords = (state.coords - (1.0 - t) * prior_.coords) / t;
  return pred;
}

/* ExternalPredictor */

ExternalPredictor::ExternalPredictor(std::string command, std::string work_dir)
    : command_(std::move(command)), work_dir_(std::move(work_dir)) { }

EndpointPrediction ExternalPredictor::predict(const RelaxedState &state,
                                              double t) const {
  static std::atomic<unsigned long> counter { 0 };
  const std::string stem = "hierflow_" + std::to_string(::getpid()) + "_"
                           + std::to_string(counter.fetch_add(1));
  const std::filesystem::path dir(work_dir_);
  const std::filesystem::path in = dir / (stem + "_state.json");
  const std::filesystem::path out = dir / (stem + "_pred.json");

  nlohmann::json j = state_to_json(state);
  j["t"] = t;
  {
    std::ofstream f(in);
    if (!f)
      throw std::runtime_error("external predictor: cannot write " + in.string());
    f << j.dump();
  }
  const std::string cmd =
      command_ + " " + shell_quote(in.string()) + " " + shell_quote(out.string());
  const int rc = std::system(cmd.c_str());
  std::filesystem::remove(in);
  if (rc != 0) {
    std::filesystem::remove(out);
    throw std::runtime_error("external predictor exited with status "
                             + std::to_string(rc));
  }
  std::ifstream f(out);
  if (!f)
    throw std::runtime_error("external predictor wrote no prediction");
  EndpointPrediction pred = prediction_from_json(nlohmann::json::parse(f));
  f.close();
  std::filesystem::remove(out);
  return pred;
}

/* JSON */

nlohmann::json state_to_json(const RelaxedState &s) {
  return { { "t", s.t },
           { "atom_logits", mat_json(s.atom_logits) },
           { "bond_logits", mat_json(s.bond_logits) },
           { "type_logits", mat_json(s.type_logits) },
           { "parent_logits", mat_json(s.parent_logits) },
           { "coords", mat_json(s.coords) },
           { "atom_mask", s.atom_mask },
           { "token_mask", s.token_mask },
           { "leaf_anchor", s.leaf_anchor } };
}

nlohmann::json prediction_to_json(const EndpointPrediction &p) {
  nlohmann::json j = { { "atom_logits", mat_json(p.atom_logits) },
                       { "bond_logits", mat_json(p.bond_logits) },
                       { "type_logits", mat_json(p.type_logits) },
                       { "parent_logits", mat_json(p.parent_logits) },
                       { "coords", mat_json(p.coords) } };
  if (p.token_hyperbolic.size() > 0)
    j["token_hyperbolic"] = mat_json(p.token_hyperbolic);
  return j;
}

EndpointPrediction prediction_from_json(const nlohmann::json &j) {
  EndpointPrediction p;
  p.atom_logits = mat_from(j.at("atom_logits"));
  p.bond_logits = mat_from(j.at("bond_logits"));
  p.type_logits = mat_from(j.at("type_logits"));
  p.parent_logits = mat_from(j.at("parent_logits"));
  Eigen::MatrixXd c = mat_from(j.at("coords"), 3);
  if (c.cols() != 3)
    throw std::invalid_argument("prediction coords must have 3 columns");
  p.coords = c;
  if (j.contains("token_hyperbolic"))
    p.token_hyperbolic = mat_from(j["token_hyperbolic"]);
  return p;
}

}  // namespace hierflow
