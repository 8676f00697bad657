//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/energies.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "hierflow/error.h"
#include "hierflow/spectral.h"

namespace hierflow {
namespace {
  constexpr std::pair<EnergyTerm, std::string_view> kTermNames[] = {
    { EnergyTerm::kValence, "valence" },
    { EnergyTerm::kCount, "count" },
    { EnergyTerm::kConnLogdet, "conn_logdet" },
    { EnergyTerm::kConnLambda2, "conn_lambda2" },
    { EnergyTerm::kConsistency, "consistency" },
    { EnergyTerm::kBondLength, "bond_length" },
    { EnergyTerm::kSteric, "steric" },
    { EnergyTerm::kHierConn, "hier_conn" },
    { EnergyTerm::kRingClosure, "ring_closure" },
    { EnergyTerm::kRingExclusivity, "ring_exclusivity" },
  };

  double softplus(double u) {
    return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
  }

  double sigmoid(double u) {
    if (u >= 0)
      return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
  }

  double relu(double x) { return x > 0.0 ? x : 0.0; }

  std::vector<int> active_atoms(const RelaxedState &s) {
    std::vector<int> out;
    for (int i = 0; i < s.num_atoms(); ++i) {
      if (s.atom_mask[i])
        out.push_back(i);
    }
    return out;
  }

  double bond_prob(const RelaxedState &s, int i, int j) {
    return 1.0 - s.bond_probs(pair_index(i, j, s.num_atoms()), 0);
  }

  // d(energy)/d(p_ij) expressed on the no-bond probability x_0 = 1 - p_ij.
  void add_pair_grad(StateGradient &g, const RelaxedState &s, int i, int j,
                     double de_dp) {
    g.bond(pair_index(i, j, s.num_atoms()), 0) -= de_dp;
  }

  void check_finite(double v, std::string_view term) {
    if (!std::isfinite(v))
      throw NumericalError("energy term " + std::string(term)
                           + " is not finite");
  }
}  // namespace

std::string_view energy_term_name(EnergyTerm term) {
  for (const auto &[t, name]: kTermNames) {
    if (t == term)
      return name;
  }
  return "unknown";
}

EnergyTerm energy_term_from_name(std::string_view name) {
  for (const auto &[t, n]: kTermNames) {
    if (n == name)
      return t;
  }
  throw std::invalid_argument("unknown energy term: " + std::string(name));
}

/* EnergyConfig */

double EnergyConfig::target_edges(int n, bool *fallback) const {
  auto it = m_target.find(n);
  if (fallback)
    *fallback = it == m_target.end();
  return it == m_target.end() ? std::max(n - 1, 0) : it->second;
}

void EnergyConfig::validate() const {
  const double weights[] = { lambda_val,       lambda_cnt,
                             lambda_conn,      lambda_bondlen,
                             lambda_steric,    eta_chem,
                             eta_cons,         eta_geom,
                             eta_geom_z,       gamma,
                             lambda_hier_conn, lambda_ring_closure,
                             lambda_ring_exclusivity, ring_beta };
  for (double w: weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("energy weights must be non-negative");
  }
  if (!(eps_laplacian > 0.0))
    throw std::invalid_argument("eps_laplacian must be positive");
  if (!(steric_sharpness > 0.0))
    throw std::invalid_argument("steric_sharpness must be positive");
  if (!(lambda_bond_min >= 0.0 && lambda_bond_min < lambda_bond_max))
    throw std::invalid_argument("need 0 <= lambda_bond_min < lambda_bond_max");
  if (!(lambda2_threshold >= 0.0))
    throw std::invalid_argument("lambda2_threshold must be non-negative");
  for (double c: length_factors) {
    if (!(c >= 0.0))
      throw std::invalid_argument("length factors must be non-negative");
  }
  for (const auto &[n, m]: m_target) {
    if (n < 1 || !(m >= 0.0))
      throw std::invalid_argument("invalid m_target entry");
  }
}

nlohmann::json EnergyConfig::to_json() const {
  nlohmann::json table = nlohmann::json::object();
  for (const auto &[n, m]: m_target)
    table[std::to_string(n)] = m;
  return {
    { "lambda_val", lambda_val },
    { "lambda_cnt", lambda_cnt },
    { "lambda_conn", lambda_conn },
    { "lambda_bondlen", lambda_bondlen },
    { "lambda_steric", lambda_steric },
    { "eta_chem", eta_chem },
    { "eta_cons", eta_cons },
    { "eta_geom", eta_geom },
    { "eta_geom_z", eta_geom_z },
    { "gamma", gamma },
    { "eps_laplacian", eps_laplacian },
    { "steric_sharpness", steric_sharpness },
    { "lambda_bond_min", lambda_bond_min },
    { "lambda_bond_max", lambda_bond_max },
    { "lambda2_threshold", lambda2_threshold },
    { "connectivity",
      connectivity == ConnectivityMode::kLogdet ? "logdet" : "lambda2" },
    { "length_factors", length_factors },
    { "hier_conn", hier_conn },
    { "ring_closure", ring_closure },
    { "ring_exclusivity", ring_exclusivity },
    { "lambda_hier_conn", lambda_hier_conn },
    { "lambda_ring_closure", lambda_ring_closure },
    { "lambda_ring_exclusivity", lambda_ring_exclusivity },
    { "ring_beta", ring_beta },
    { "m_target", table },
  };
}

EnergyConfig EnergyConfig::from_json(const nlohmann::json &j) {
  EnergyConfig c;
  if (!j.is_object())
    throw std::invalid_argument("energies: expected an object");

  const std::pair<const char *, double *> reals[] = {
    { "lambda_val", &c.lambda_val },
    { "lambda_cnt", &c.lambda_cnt },
    { "lambda_conn", &c.lambda_conn },
    { "lambda_bondlen", &c.lambda_bondlen },
    { "lambda_steric", &c.lambda_steric },
    { "eta_chem", &c.eta_chem },
    { "eta_cons", &c.eta_cons },
    { "eta_geom", &c.eta_geom },
    { "eta_geom_z", &c.eta_geom_z },
    { "gamma", &c.gamma },
    { "eps_laplacian", &c.eps_laplacian },
    { "steric_sharpness", &c.steric_sharpness },
    { "lambda_bond_min", &c.lambda_bond_min },
    { "lambda_bond_max", &c.lambda_bond_max },
    { "lambda2_threshold", &c.lambda2_threshold },
    { "lambda_hier_conn", &c.lambda_hier_conn },
    { "lambda_ring_closure", &c.lambda_ring_closure },
    { "lambda_ring_exclusivity", &c.lambda_ring_exclusivity },
    { "ring_beta", &c.ring_beta },
  };
  const std::pair<const char *, bool *> flags[] = {
    { "hier_conn", &c.hier_conn },
    { "ring_closure", &c.ring_closure },
    { "ring_exclusivity", &c.ring_exclusivity },
  };

  for (const auto &[key, value]: j.items()) {
    bool known = false;
    for (const auto &[name, field]: reals) {
      if (key == name) {
        *field = value.get<double>();
        known = true;
      }
    }
    for (const auto &[name, field]: flags) {
      if (key == name) {
        *field = value.get<bool>();
        known = true;
      }
    }
    if (key == "connectivity") {
      const std::string mode = value.get<std::string>();
      if (mode == "logdet")
        c.connectivity = ConnectivityMode::kLogdet;
      else if (mode == "lambda2")
        c.connectivity = ConnectivityMode::kLambda2;
      else
        throw std::invalid_argument("energies.connectivity: unknown mode "
                                    + mode);
      known = true;
    } else if (key == "length_factors") {
      c.length_factors = value.get<std::vector<double>>();
      known = true;
    } else if (key == "m_target") {
      c.m_target.clear();
      for (const auto &[n, m]: value.items())
        c.m_target[std::stoi(n)] = m.get<double>();
      known = true;
    }
    if (!known)
      throw std::invalid_argument("energies: unknown key " + key);
  }
  c.validate();
  return c;
}

double anneal(double eta0, double gamma, double t) {
  if (t >= 1.0)
    return 0.0;
  return eta0 * std::pow(1.0 - t, gamma);
}

double soft_element_constant(const Eigen::Ref<const Eigen::VectorXd> &alpha,
                             ElementColumn column, const ElementTable &table) {
  if (alpha.size() != table.size())
    throw std::invalid_argument("soft_element_constant: vocabulary mismatch");
  return alpha.dot(table.column(column));
}

/* StateGradient */

StateGradient StateGradient::zeros(const RelaxedState &s) {
  StateGradient g;
  g.atom = Eigen::MatrixXd::Zero(s.atom_probs.rows(), s.atom_probs.cols());
  g.bond = Eigen::MatrixXd::Zero(s.bond_probs.rows(), s.bond_probs.cols());
  g.type = Eigen::MatrixXd::Zero(s.type_probs.rows(), s.type_probs.cols());
  g.parent =
      Eigen::MatrixXd::Zero(s.parent_probs.rows(), s.parent_probs.cols());
  g.coords = Eigen::MatrixX3d::Zero(s.coords.rows(), 3);
  return g;
}

StateGradient &StateGradient::operator+=(const StateGradient &o) {
  return add_scaled(o, 1.0);
}

StateGradient &StateGradient::add_scaled(const StateGradient &o, double k) {
  atom += k * o.atom;
  bond += k * o.bond;
  type += k * o.type;
  parent += k * o.parent;
  coords += k * o.coords;
  return *this;
}

bool StateGradient::all_finite() const {
  return atom.allFinite() && bond.allFinite() && type.allFinite()
         && parent.allFinite() && coords.allFinite();
}

double StateGradient::max_abs() const {
  double m = 0.0;
  for (const Eigen::MatrixXd *b: { &atom, &bond, &type, &parent }) {
    if (b->size() > 0)
      m = std::max(m, b->cwiseAbs().maxCoeff());
  }
  if (coords.size() > 0)
    m = std::max(m, coords.cwiseAbs().maxCoeff());
  return m;
}

StateGradient to_logit_space(const RelaxedState &s, const StateGradient &g) {
  const int n = s.num_atoms();
  std::vector<bool> pair_mask(num_pairs(n));
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p)
      pair_mask[p] = s.pair_active(i, j);
  }
  std::vector<bool> parent_rows = s.token_mask;
  if (!parent_rows.empty())
    parent_rows[0] = false;

  StateGradient out;
  out.atom = softmax_backward_rows(s.atom_probs, g.atom, s.atom_mask);
  out.bond = softmax_backward_rows(s.bond_probs, g.bond, pair_mask);
  out.type = softmax_backward_rows(s.type_probs, g.type, s.token_mask);
  out.parent = softmax_backward_rows(s.parent_probs, g.parent, parent_rows);
  out.coords = g.coords;
  for (int i = 0; i < n; ++i) {
    if (!s.atom_mask[i])
      out.coords.row(i).setZero();
  }
  return out;
}

/* EnergyModel */

EnergyModel::EnergyModel(ElementTable table, BondOrders orders,
                         EnergyConfig config)
    : table_(std::move(table)), orders_(std::move(orders)),
      config_(std::move(config)) {
  config_.validate();
  if (static_cast<int>(config_.length_factors.size()) < orders_.size())
    throw std::invalid_argument("length_factors shorter than bond categories");
  max_valence_ = table_.column(ElementColumn::kMaxValence);
  cov_radius_ = table_.column(ElementColumn::kCovalentRadius);
  vdw_radius_ = table_.column(ElementColumn::kVdwRadius);
  bond_order_ = orders_.vector();
}

double EnergyModel::valence(const RelaxedState &s, double w,
                            StateGradient &g) const {
  const int n = s.num_atoms();
  Eigen::VectorXd excess = Eigen::VectorXd::Zero(n);
  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!s.atom_mask[i])
      continue;
    double deg = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i && s.atom_mask[j])
        deg += s.bond_probs.row(pair_index(i, j, n)).dot(bond_order_);
    }
    const double cap = s.atom_probs.row(i).dot(max_valence_);
    excess[i] = relu(deg - cap);
    value += excess[i] * excess[i];
    g.atom.row(i) -= w * 2.0 * excess[i] * max_valence_.transpose();
  }
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (s.pair_active(i, j))
        g.bond.row(p) += w * 2.0 * (excess[i] + excess[j])
                         * bond_order_.transpose();
    }
  }
  return value;
}

double EnergyModel::count(const RelaxedState &s, double w,
                          StateGradient &g) const {
  const int n = s.num_atoms();
  double total = 0.0;
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (s.pair_active(i, j))
        total += 1.0 - s.bond_probs(p, 0);
    }
  }
  const double diff = total - config_.target_edges(s.num_active_atoms());
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (s.pair_active(i, j))
        g.bond(p, 0) -= w * 2.0 * diff;
    }
  }
  return diff * diff;
}

double EnergyModel::conn_logdet(const RelaxedState &s,
                                const std::vector<int> &atoms, double w,
                                StateGradient &g) const {
  const int m = static_cast<int>(atoms.size());
  if (m == 0)
    return 0.0;
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b)
      weights(a, b) = weights(b, a) = bond_prob(s, atoms[a], atoms[b]);
  }
  Eigen::MatrixXd mat = laplacian(weights);
  mat.diagonal().array() += config_.eps_laplacian;

  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() != Eigen::Success)
    throw NumericalError("conn_logdet: Laplacian factorization failed");
  const double value =
      -2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  check_finite(value, "conn_logdet");

  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double de_dp = -(inv(a, a) + inv(b, b) - 2.0 * inv(a, b));
      add_pair_grad(g, s, atoms[a], atoms[b], w * de_dp);
    }
  }
  return value;
}

double EnergyModel::conn_lambda2(const RelaxedState &s, double w,
                                 StateGradient &g) const {
  const std::vector<int> atoms = active_atoms(s);
  const int m = static_cast<int>(atoms.size());
  if (m < 2)
    return 0.0;
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b)
      weights(a, b) = weights(b, a) = bond_prob(s, atoms[a], atoms[b]);
  }
  const Lambda2Result eig = algebraic_connectivity(laplacian(weights));
  const double gap = relu(config_.lambda2_threshold - eig.value);
  if (gap == 0.0)
    return 0.0;

  // Eigenvalue derivative averaged over the degenerate eigenspace.
  const Eigen::MatrixXd &v = eig.vectors;
  const double k = static_cast<double>(v.cols());
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double dl_dp = (v.row(a) - v.row(b)).squaredNorm() / k;
      add_pair_grad(g, s, atoms[a], atoms[b], -w * 2.0 * gap * dl_dp);
    }
  }
  return gap * gap;
}

double EnergyModel::consistency(const RelaxedState &s, const EnergyInputs &in,
                                double w, StateGradient &g) const {
  const int n = s.num_atoms();
  if (in.similarity.rows() != n || in.similarity.cols() != n)
    throw std::invalid_argument("consistency: similarity matrix must be N x N");
  double value = 0.0;
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (!s.pair_active(i, j))
        continue;
      const double diff = (1.0 - s.bond_probs(p, 0)) - in.similarity(i, j);
      value += diff * diff;
      g.bond(p, 0) -= w * 2.0 * diff;
    }
  }
  return value;
}

double EnergyModel::bond_length(const RelaxedState &s, double w,
                                StateGradient &g) const {
  const int n = s.num_atoms();
  const int k_count = orders_.size();
  Eigen::VectorXd radius = s.atom_probs * cov_radius_;
  double value = 0.0;
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (!s.pair_active(i, j))
        continue;
      const Eigen::RowVector3d diff = s.coords.row(i) - s.coords.row(j);
      const double d = diff.norm();
      const double rsum = radius[i] + radius[j];
      double de_dd = 0.0, de_dr = 0.0;
      for (int k = 1; k < k_count; ++k) {
        const double c = config_.length_factors[k];
        const double e = d - c * rsum;
        const double x = s.bond_probs(p, k);
        value += x * e * e;
        g.bond(p, k) += w * e * e;
        de_dd += x * 2.0 * e;
        de_dr -= x * 2.0 * e * c;
      }
      g.atom.row(i) += w * de_dr * cov_radius_.transpose();
      g.atom.row(j) += w * de_dr * cov_radius_.transpose();
      if (d > 1e-12) {
        g.coords.row(i) += w * de_dd * diff / d;
        g.coords.row(j) -= w * de_dd * diff / d;
      }
    }
  }
  return value;
}

double EnergyModel::steric(const RelaxedState &s, double w,
                           StateGradient &g) const {
  const int n = s.num_atoms();
  const double sharp = config_.steric_sharpness;
  const double lam = config_.lambda_bond(std::clamp(s.t, 0.0, 1.0));
  Eigen::VectorXd radius = s.atom_probs * vdw_radius_;
  double value = 0.0;
  for (int i = 0, p = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      if (!s.pair_active(i, j))
        continue;
      const Eigen::RowVector3d diff = s.coords.row(i) - s.coords.row(j);
      const double d = diff.norm();
      const double u = sharp * (radius[i] + radius[j] - d);
      const double sp = softplus(u);
      const double f = sp * sp;
      const double pb = 1.0 - s.bond_probs(p, 0);
      const double weight = 1.0 - (1.0 - lam) * pb;
      value += weight * f;

      g.bond(p, 0) += w * (1.0 - lam) * f;
      const double de_du = weight * 2.0 * sp * sigmoid(u);
      g.atom.row(i) += w * de_du * sharp * vdw_radius_.transpose();
      g.atom.row(j) += w * de_du * sharp * vdw_radius_.transpose();
      if (d > 1e-12) {
        g.coords.row(i) -= w * de_du * sharp * diff / d;
        g.coords.row(j) += w * de_du * sharp * diff / d;
      }
    }
  }
  return value;
}

double EnergyModel::hier_conn(const RelaxedState &s, const EnergyInputs &in,
                              double w, StateGradient &g) const {
  double value = 0.0;
  for (const std::vector<int> &motif: in.motifs) {
    std::vector<int> atoms;
    for (int a: motif) {
      if (a < 0 || a >= s.num_atoms())
        throw std::out_of_range("hier_conn: motif atom out of range");
      if (s.atom_mask[a])
        atoms.push_back(a);
    }
    value += conn_logdet(s, atoms, w, g);
  }
  return value;
}

double EnergyModel::ring_closure(const RelaxedState &s, const EnergyInputs &in,
                                 double w, StateGradient &g) const {
  double value = 0.0;
  for (const Ring &ring: in.rings) {
    const int k = static_cast<int>(ring.size());
    double total = 0.0;
    for (int e = 0; e < k; ++e)
      total += bond_prob(s, ring[e], ring[(e + 1) % k]);
    const double diff = total - k;
    value += diff * diff;
    for (int e = 0; e < k; ++e)
      add_pair_grad(g, s, ring[e], ring[(e + 1) % k], w * 2.0 * diff);
  }
  return value;
}

double EnergyModel::ring_exclusivity(const RelaxedState &s,
                                     const EnergyInputs &in, double w,
                                     StateGradient &g) const {
  const int n = s.num_atoms();
  std::map<int, std::set<int>> ring_nbrs;
  for (const Ring &ring: in.rings) {
    const int k = static_cast<int>(ring.size());
    for (int e = 0; e < k; ++e) {
      ring_nbrs[ring[e]].insert(ring[(e + 1) % k]);
      ring_nbrs[ring[(e + 1) % k]].insert(ring[e]);
    }
  }
  const double beta = config_.ring_beta;
  double value = 0.0;
  for (const auto &[i, inside]: ring_nbrs) {
    if (!s.atom_mask[i])
      continue;
    double ext = 0.0, ring = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i || !s.atom_mask[j])
        continue;
      (inside.count(j) ? ring : ext) += bond_prob(s, i, j);
    }
    const double excess = ext - beta * ring;
    if (excess <= 0.0)
      continue;
    value += excess;
    for (int j = 0; j < n; ++j) {
      if (j == i || !s.atom_mask[j])
        continue;
      add_pair_grad(g, s, i, j, inside.count(j) ? -w * beta : w);
    }
  }
  return value;
}

double EnergyModel::accumulate(EnergyTerm which, const RelaxedState &s,
                               const EnergyInputs &in, double w,
                               StateGradient &g) const {
  double value = 0.0;
  switch (which) {
  case EnergyTerm::kValence:
    value = valence(s, w, g);
    break;
  case EnergyTerm::kCount:
    value = count(s, w, g);
    break;
  case EnergyTerm::kConnLogdet:
    value = conn_logdet(s, active_atoms(s), w, g);
    break;
  case EnergyTerm::kConnLambda2:
    value = conn_lambda2(s, w, g);
    break;
  case EnergyTerm::kConsistency:
    value = consistency(s, in, w, g);
    break;
  case EnergyTerm::kBondLength:
    value = bond_length(s, w, g);
    break;
  case EnergyTerm::kSteric:
    value = steric(s, w, g);
    break;
  case EnergyTerm::kHierConn:
    value = hier_conn(s, in, w, g);
    break;
  case EnergyTerm::kRingClosure:
    value = ring_closure(s, in, w, g);
    break;
  case EnergyTerm::kRingExclusivity:
    value = ring_exclusivity(s, in, w, g);
    break;
  }
  check_finite(value, energy_term_name(which));
  return value;
}

double EnergyModel::term(EnergyTerm which, const RelaxedState &s,
                         const EnergyInputs &in, StateGradient *grad) const {
  StateGradient g = StateGradient::zeros(s);
  const double value = accumulate(which, s, in, 1.0, g);
  if (grad) {
    *grad = to_logit_space(s, g);
    if (!grad->all_finite())
      throw NumericalError("gradient of energy term "
                           + std::string(energy_term_name(which))
                           + " is not finite");
  }
  return value;
}

std::vector<std::pair<EnergyTerm, double>> EnergyModel::chem_terms() const {
  const EnergyTerm conn = config_.connectivity == ConnectivityMode::kLogdet
                              ? EnergyTerm::kConnLogdet
                              : EnergyTerm::kConnLambda2;
  return { { EnergyTerm::kValence, config_.lambda_val },
           { EnergyTerm::kCount, config_.lambda_cnt },
           { conn, config_.lambda_conn } };
}

std::vector<std::pair<EnergyTerm, double>>
EnergyModel::cons_terms(const EnergyInputs &in) const {
  std::vector<std::pair<EnergyTerm, double>> out;
  if (in.similarity.size() > 0)
    out.emplace_back(EnergyTerm::kConsistency, 1.0);
  if (config_.hier_conn)
    out.emplace_back(EnergyTerm::kHierConn, config_.lambda_hier_conn);
  if (config_.ring_closure)
    out.emplace_back(EnergyTerm::kRingClosure, config_.lambda_ring_closure);
  if (config_.ring_exclusivity)
    out.emplace_back(EnergyTerm::kRingExclusivity,
                     config_.lambda_ring_exclusivity);
  return out;
}

std::vector<std::pair<EnergyTerm, double>> EnergyModel::geom_terms() const {
  return { { EnergyTerm::kBondLength, config_.lambda_bondlen },
           { EnergyTerm::kSteric, config_.lambda_steric } };
}

EnergyReport EnergyModel::evaluate(const RelaxedState &s,
                                   const EnergyInputs &in) const {
  EnergyReport report;
  auto group = [&](const std::vector<std::pair<EnergyTerm, double>> &terms,
                   double &total, StateGradient &grad) {
    StateGradient g = StateGradient::zeros(s);
    total = 0.0;
    for (const auto &[t, w]: terms) {
      const double v = accumulate(t, s, in, w, g);
      report.values[t] = v;
      total += w * v;
    }
    grad = to_logit_space(s, g);
    if (!grad.all_finite())
      throw NumericalError("non-finite energy gradient");
  };
  group(chem_terms(), report.chem, report.chem_grad);
  group(cons_terms(in), report.cons, report.cons_grad);
  group(geom_terms(), report.geom, report.geom_grad);
  return report;
}

}  // namespace hierflow
