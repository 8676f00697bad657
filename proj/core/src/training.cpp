//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/training.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hierflow {
namespace {
  void require_same(bool ok, const char *what) {
    if (!ok)
      throw std::invalid_argument(std::string("interpolate: ") + what
                                  + " mismatch");
  }

  // Log-softmax cross-entropy of row z against label y; writes the gradient
  // (softmax - onehot) into g when requested.
  double cross_entropy(const Eigen::Ref<const Eigen::RowVectorXd> &z, int y,
                       const std::vector<bool> &valid, double scale,
                       Eigen::MatrixXd &grad, int row, bool want_grad) {
    if (y < 0 || y >= z.size() || (!valid.empty() && !valid[y]))
      throw std::out_of_range("endpoint_losses: label " + std::to_string(y)
                              + " outside the vocabulary");
    double zmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < z.size(); ++k) {
      if (valid.empty() || valid[k])
        zmax = std::max(zmax, z[k]);
    }
    double sum = 0.0;
    for (int k = 0; k < z.size(); ++k) {
      if (valid.empty() || valid[k])
        sum += std::exp(z[k] - zmax);
    }
    const double lse = zmax + std::log(sum);
    if (want_grad) {
      for (int k = 0; k < z.size(); ++k) {
        if (valid.empty() || valid[k])
          grad(row, k) += scale * std::exp(z[k] - lse);
      }
      grad(row, y) -= scale;
    }
    return lse - z[y];
  }
}  // namespace

RelaxedState interpolate(const RelaxedState &x1, const RelaxedState &x0,
                         double t, double clip) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("interpolate: t must lie in [0, 1]");
  require_same(x1.dims().atoms == x0.dims().atoms
                   && x1.dims().atom_types == x0.dims().atom_types
                   && x1.dims().bond_types == x0.dims().bond_types
                   && x1.dims().tokens == x0.dims().tokens
                   && x1.dims().token_types == x0.dims().token_types,
               "shape");
  require_same(x1.atom_mask == x0.atom_mask && x1.token_mask == x0.token_mask,
               "mask");
  require_same(x1.leaf_anchor == x0.leaf_anchor, "leaf anchor");

  RelaxedState out = x1;
  out.t = t;
  out.atom_probs = t * x1.atom_probs + (1.0 - t) * x0.atom_probs;
  out.bond_probs = t * x1.bond_probs + (1.0 - t) * x0.bond_probs;
  out.type_probs = t * x1.type_probs + (1.0 - t) * x0.type_probs;
  out.parent_probs = causal_renormalize(
      t * x1.parent_probs + (1.0 - t) * x0.parent_probs, out.token_mask);
  out.coords = t * x1.coords + (1.0 - t) * x0.coords;

  auto relogit = [clip](const Eigen::MatrixXd &p, Eigen::MatrixXd &z) {
    for (int r = 0; r < p.rows(); ++r)
      z.row(r) = probs_to_logits(p.row(r).transpose(), clip).transpose();
  };
  relogit(out.atom_probs, out.atom_logits);
  relogit(out.bond_probs, out.bond_logits);
  relogit(out.type_probs, out.type_logits);
  out.parent_logits.setZero();
  for (int a = 1; a < out.num_tokens(); ++a) {
    if (!out.token_mask[a])
      continue;
    for (int b = 0; b < a; ++b) {
      if (out.parent_valid(a, b))
        out.parent_logits(a, b) =
            std::log(std::clamp(out.parent_probs(a, b), clip, 1.0 - clip));
    }
  }
  return out;
}

LossTargets LossTargets::from(const Molecule &mol, const HierarchyPlan &plan) {
  const int n = mol.size();
  if (plan.num_atoms() != n)
    throw std::invalid_argument("LossTargets: plan does not match molecule");
  LossTargets t;
  t.elements = mol.elements;
  t.bonds.reserve(num_pairs(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      t.bonds.push_back(mol.bonds(i, j));
  }
  t.types = plan.type_ids();
  t.parents = plan.parents();
  t.coords = mol.coords;
  t.token_mask = plan.mask;
  return t;
}

LossBreakdown endpoint_losses(const EndpointPrediction &pred,
                              const LossTargets &target,
                              const LossWeights &w, LossGradient *grad) {
  const int n = static_cast<int>(target.elements.size());
  const int a_count = static_cast<int>(target.types.size());
  if (pred.atom_logits.rows() != n || pred.coords.rows() != n
      || target.coords.rows() != n
      || pred.bond_logits.rows() != num_pairs(n)
      || static_cast<int>(target.bonds.size()) != num_pairs(n)
      || pred.type_logits.rows() != a_count
      || pred.parent_logits.rows() != a_count
      || pred.parent_logits.cols() != a_count
      || static_cast<int>(target.parents.size()) != a_count
      || static_cast<int>(target.token_mask.size()) != a_count)
    throw std::invalid_argument("endpoint_losses: shape mismatch");

  const bool want = grad != nullptr;
  LossGradient scratch;
  LossGradient &g = want ? *grad : scratch;
  g.atom = Eigen::MatrixXd::Zero(pred.atom_logits.rows(),
                                 pred.atom_logits.cols());
  g.bond = Eigen::MatrixXd::Zero(pred.bond_logits.rows(),
                                 pred.bond_logits.cols());
  g.type = Eigen::MatrixXd::Zero(pred.type_logits.rows(),
                                 pred.type_logits.cols());
  g.parent = Eigen::MatrixXd::Zero(a_count, a_count);
  g.coords = Eigen::MatrixX3d::Zero(n, 3);

  LossBreakdown out;
  for (int i = 0; i < n; ++i)
    out.atom += cross_entropy(pred.atom_logits.row(i), target.elements[i], {},
                              1.0, g.atom, i, want);
  for (int p = 0; p < num_pairs(n); ++p)
    out.bond += cross_entropy(pred.bond_logits.row(p), target.bonds[p], {},
                              w.bond, g.bond, p, want);
  for (int a = 0; a < a_count; ++a) {
    if (!target.token_mask[a])
      continue;
    out.type += cross_entropy(pred.type_logits.row(a), target.types[a], {},
                              w.plan, g.type, a, want);
    if (a == 0)
      continue;
    std::vector<bool> valid(a_count, false);
    for (int b = 0; b < a; ++b)
      valid[b] = target.token_mask[b];
    out.parent += cross_entropy(pred.parent_logits.row(a), target.parents[a],
                                valid, w.plan, g.parent, a, want);
  }
  if (n > 0) {
    const Eigen::MatrixX3d diff = pred.coords - target.coords;
    out.coord = diff.squaredNorm() / n;
    if (want)
      g.coords = (2.0 * w.coord / n) * diff;
  }
  out.total = out.atom + w.bond * out.bond + w.plan * (out.type + out.parent)
              + w.coord * out.coord;
  return out;
}

}  // namespace hierflow
