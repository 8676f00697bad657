//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/relaxed_state.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hierflow/error.h"

namespace hierflow {
namespace {
  void pin_row(Eigen::MatrixXd &logits, Eigen::MatrixXd &probs, int r) {
    logits.row(r).setConstant(kPadLogit);
    logits(r, 0) = 0.0;
    probs.row(r).setZero();
    probs(r, 0) = 1.0;
  }

  Eigen::RowVectorXd softmax_row(const Eigen::RowVectorXd &z) {
    Eigen::RowVectorXd e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
  }

  double row_violation(const Eigen::RowVectorXd &p) {
    double v = std::abs(p.sum() - 1.0);
    if (p.size() > 0)
      v = std::max(v, -p.minCoeff());
    return v;
  }
}  // namespace

std::pair<int, int> pair_atoms(int p, int n) {
  int i = 0;
  int row_len = n - 1;
  while (p >= row_len) {
    p -= row_len;
    ++i;
    --row_len;
  }
  return { i, i + 1 + p };
}

RelaxedState RelaxedState::zeros(const StateDims &dims) {
  RelaxedState s;
  const int pairs = num_pairs(dims.atoms);
  s.atom_logits = Eigen::MatrixXd::Zero(dims.atoms, dims.atom_types);
  s.bond_logits = Eigen::MatrixXd::Zero(pairs, dims.bond_types);
  s.type_logits = Eigen::MatrixXd::Zero(dims.tokens, dims.token_types);
  s.parent_logits = Eigen::MatrixXd::Zero(dims.tokens, dims.tokens);
  s.coords = Eigen::MatrixX3d::Zero(dims.atoms, 3);
  s.atom_mask.assign(dims.atoms, true);
  s.token_mask.assign(dims.tokens, true);
  s.leaf_anchor.assign(dims.atoms, 0);
  s.refresh_probabilities();
  return s;
}

StateDims RelaxedState::dims() const {
  return { num_atoms(), static_cast<int>(atom_logits.cols()),
           static_cast<int>(bond_logits.cols()), num_tokens(),
           static_cast<int>(type_logits.cols()) };
}

int RelaxedState::num_active_atoms() const {
  return static_cast<int>(std::count(atom_mask.begin(), atom_mask.end(), true));
}

bool RelaxedState::parent_valid(int alpha, int beta) const {
  if (alpha <= 0 || beta < 0 || beta >= alpha)
    return false;
  if (!token_mask[alpha])
    return beta == 0;
  return token_mask[beta];
}

void RelaxedState::refresh_probabilities() {
  const int n = num_atoms();
  const int a = num_tokens();

  atom_probs.resize(atom_logits.rows(), atom_logits.cols());
  for (int i = 0; i < n; ++i) {
    if (atom_mask[i]) {
      atom_probs.row(i) = softmax_row(atom_logits.row(i));
    } else {
      pin_row(atom_logits, atom_probs, i);
    }
  }

  bond_probs.resize(bond_logits.rows(), bond_logits.cols());
  for (int p = 0; p < bond_logits.rows(); ++p) {
    auto [i, j] = pair_atoms(p, n);
    if (pair_active(i, j)) {
      bond_probs.row(p) = softmax_row(bond_logits.row(p));
    } else {
      pin_row(bond_logits, bond_probs, p);
    }
  }

  type_probs.resize(type_logits.rows(), type_logits.cols());
  for (int alpha = 0; alpha < a; ++alpha) {
    if (token_mask[alpha]) {
      type_probs.row(alpha) = softmax_row(type_logits.row(alpha));
    } else {
      pin_row(type_logits, type_probs, alpha);
    }
  }

  parent_probs = Eigen::MatrixXd::Zero(a, a);
  std::vector<bool> valid(a);
  for (int alpha = 0; alpha < a; ++alpha) {
    for (int beta = 0; beta < a; ++beta) {
      valid[beta] = parent_valid(alpha, beta);
      if (!valid[beta])
        parent_logits(alpha, beta) = 0.0;
    }
    if (alpha == 0)
      continue;
    parent_probs.row(alpha) =
        masked_softmax(parent_logits.row(alpha).transpose(), valid).transpose();
  }
}

double RelaxedState::simplex_violation() const {
  double worst = 0.0;
  auto check_block = [&](const Eigen::MatrixXd &z, const Eigen::MatrixXd &p) {
    for (int r = 0; r < p.rows(); ++r) {
      worst = std::max(worst, row_violation(p.row(r)));
      worst = std::max(worst, (softmax_row(z.row(r)) - p.row(r))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  };
  check_block(atom_logits, atom_probs);
  check_block(bond_logits, bond_probs);
  check_block(type_logits, type_probs);

  const int a = num_tokens();
  std::vector<bool> valid(a);
  for (int alpha = 1; alpha < a; ++alpha) {
    for (int beta = 0; beta < a; ++beta)
      valid[beta] = parent_valid(alpha, beta);
    Eigen::RowVectorXd p = parent_probs.row(alpha);
    worst = std::max(worst, row_violation(p));
    Eigen::RowVectorXd q =
        masked_softmax(parent_logits.row(alpha).transpose(), valid)
            .transpose();
    worst = std::max(worst, (q - p).cwiseAbs().maxCoeff());
  }
  if (a > 0)
    worst = std::max(worst, parent_probs.row(0).cwiseAbs().maxCoeff());
  return worst;
}

Eigen::VectorXd logits_to_probs(const Eigen::Ref<const Eigen::VectorXd> &z) {
  if (!z.allFinite())
    throw NumericalError("logits_to_probs: non-finite logits");
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::VectorXd probs_to_logits(const Eigen::Ref<const Eigen::VectorXd> &p,
                                double eps) {
  if (!p.allFinite())
    throw std::invalid_argument("probs_to_logits: non-finite probabilities");
  if (p.size() > 0 && p.minCoeff() < 0)
    throw std::invalid_argument("probs_to_logits: negative probability");
  if (!(eps > 0 && eps < 0.5))
    throw std::invalid_argument("probs_to_logits: eps must be in (0, 0.5)");
  Eigen::VectorXd clipped = p.cwiseMax(eps).cwiseMin(1.0 - eps);
  return clipped.array().log();
}

Eigen::VectorXd masked_softmax(const Eigen::Ref<const Eigen::VectorXd> &z,
                               const std::vector<bool> &valid) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(z.size());
  double zmax = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < z.size(); ++k) {
    if (valid[k])
      zmax = std::max(zmax, z[k]);
  }
  if (!std::isfinite(zmax))
    return out;
  double sum = 0;
  for (int k = 0; k < z.size(); ++k) {
    if (valid[k]) {
      out[k] = std::exp(z[k] - zmax);
      sum += out[k];
    }
  }
  return out / sum;
}

Eigen::VectorXd softmax_backward(const Eigen::Ref<const Eigen::VectorXd> &p,
                                 const Eigen::Ref<const Eigen::VectorXd> &g) {
  return p.cwiseProduct((g.array() - p.dot(g)).matrix());
}

Eigen::MatrixXd softmax_backward_rows(const Eigen::MatrixXd &probs,
                                      const Eigen::MatrixXd &grad,
                                      const std::vector<bool> &row_mask) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(probs.rows(), probs.cols());
  for (int r = 0; r < probs.rows(); ++r) {
    if (!row_mask.empty() && !row_mask[r])
      continue;
    double inner = probs.row(r).dot(grad.row(r));
    out.row(r) = probs.row(r).cwiseProduct(
        (grad.row(r).array() - inner).matrix());
  }
  return out;
}

double expected_bond_order(const Eigen::Ref<const Eigen::VectorXd> &x,
                           const BondOrders &orders) {
  if (x.size() != orders.size())
    throw std::invalid_argument(
        "expected_bond_order: distribution has " + std::to_string(x.size())
        + " entries, bond vocabulary has " + std::to_string(orders.size()));
  return x.dot(orders.vector());
}

double soft_degree(const RelaxedState &state, int i, const BondOrders &orders) {
  const int n = state.num_atoms();
  if (i < 0 || i >= n)
    throw std::out_of_range("soft_degree: atom index out of range");
  if (!state.atom_mask[i])
    return 0.0;
  const Eigen::VectorXd w = orders.vector();
  double deg = 0;
  for (int j = 0; j < n; ++j) {
    if (j == i || !state.atom_mask[j])
      continue;
    deg += state.bond_probs.row(pair_index(i, j, n)).dot(w);
  }
  return deg;
}

Eigen::VectorXd soft_degrees(const RelaxedState &state,
                             const BondOrders &orders) {
  const int n = state.num_atoms();
  if (state.bond_probs.cols() != orders.size())
    throw std::invalid_argument("soft_degrees: bond vocabulary mismatch");
  Eigen::VectorXd eo = state.bond_probs * orders.vector();
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
  for (int p = 0; p < eo.size(); ++p) {
    auto [i, j] = pair_atoms(p, n);
    if (!state.pair_active(i, j))
      continue;
    deg[i] += eo[p];
    deg[j] += eo[p];
  }
  return deg;
}

Eigen::MatrixX3d recenter(const Eigen::MatrixX3d &coords,
                          const std::vector<bool> &mask) {
  Eigen::RowVector3d mean = Eigen::RowVector3d::Zero();
  int count = 0;
  for (int i = 0; i < coords.rows(); ++i) {
    if (mask.empty() || mask[i]) {
      mean += coords.row(i);
      ++count;
    }
  }
  if (count == 0)
    throw std::invalid_argument("recenter: no unmasked atoms");
  mean /= count;

  Eigen::MatrixX3d out = coords;
  for (int i = 0; i < coords.rows(); ++i) {
    if (mask.empty() || mask[i]) {
      out.row(i) -= mean;
    } else {
      out.row(i).setZero();
    }
  }
  return out;
}

}  // namespace hierflow
