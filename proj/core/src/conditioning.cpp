//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/conditioning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hierflow {
namespace {
  void check_rbf(const RbfConfig &cfg) {
    if (cfg.n_basis < 2)
      throw std::invalid_argument("rbf: need at least two basis functions");
    if (!(cfg.d_min < cfg.d_max))
      throw std::invalid_argument("rbf: d_min must be below d_max");
  }
}  // namespace

AttentionResult masked_attention(const AttentionInputs &in) {
  const int n = static_cast<int>(in.queries.rows());
  const int a_count = static_cast<int>(in.keys.rows());
  const int d = static_cast<int>(in.queries.cols());
  if (in.keys.cols() != d || in.values.rows() != a_count
      || in.distances.rows() != n || in.distances.cols() != a_count
      || in.ancestor.rows() != n || in.ancestor.cols() != a_count
      || static_cast<int>(in.token_mask.size()) != a_count)
    throw std::invalid_argument("masked_attention: dimension mismatch");
  if (!(in.eps > 0.0))
    throw std::invalid_argument("masked_attention: eps must be positive");
  if (std::none_of(in.token_mask.begin(), in.token_mask.end(),
                   [](bool m) { return m; }))
    throw std::invalid_argument("masked_attention: all tokens masked");

  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max(d, 1)));
  AttentionResult out;
  out.weights = Eigen::MatrixXd::Zero(n, a_count);
  Eigen::VectorXd scores(a_count);
  for (int i = 0; i < n; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < a_count; ++a) {
      if (!in.token_mask[a])
        continue;
      const double pi = in.ancestor(i, a);
      if (pi < 0.0 || pi > 1.0)
        throw std::invalid_argument("masked_attention: ancestor mask outside "
                                    "[0, 1]");
      scores[a] = in.queries.row(i).dot(in.keys.row(a)) * scale
                  + in.bias(in.distances(i, a)) + std::log(pi + in.eps);
      top = std::max(top, scores[a]);
    }
    double total = 0.0;
    for (int a = 0; a < a_count; ++a) {
      if (in.token_mask[a]) {
        out.weights(i, a) = std::exp(scores[a] - top);
        total += out.weights(i, a);
      }
    }
    out.weights.row(i) /= total;
  }
  out.contexts = out.weights * in.values;
  return out;
}

Eigen::VectorXd rbf_encode(double d, const RbfConfig &cfg) {
  check_rbf(cfg);
  const double sigma = cfg.spacing();
  Eigen::VectorXd out(cfg.n_basis);
  for (int m = 0; m < cfg.n_basis; ++m) {
    const double z = (d - cfg.center(m)) / sigma;
    out[m] = std::exp(-0.5 * z * z);
  }
  return out;
}

Eigen::VectorXd rbf_derivative(double d, const RbfConfig &cfg) {
  const Eigen::VectorXd phi = rbf_encode(d, cfg);
  const double sigma = cfg.spacing();
  Eigen::VectorXd out(cfg.n_basis);
  for (int m = 0; m < cfg.n_basis; ++m)
    out[m] = -(d - cfg.center(m)) / (sigma * sigma) * phi[m];
  return out;
}

int edge_descriptor_size(int state_dim, int context_dim, int n_basis) {
  return 2 * state_dim + 2 + n_basis + 2 * context_dim + 2;
}

Eigen::VectorXd edge_descriptor(const Eigen::VectorXd &s_i,
                                const Eigen::VectorXd &s_j, double deg_i,
                                double deg_j, double distance,
                                const Eigen::VectorXd &c_i,
                                const Eigen::VectorXd &c_j, double t,
                                double hyp_distance, const RbfConfig &rbf) {
  if (s_i.size() != s_j.size() || c_i.size() != c_j.size())
    throw std::invalid_argument("edge_descriptor: dimension mismatch");
  const int h = static_cast<int>(s_i.size());
  const int dc = static_cast<int>(c_i.size());

  Eigen::VectorXd out(edge_descriptor_size(h, dc, rbf.n_basis));
  int o = 0;
  out.segment(o, h) = (s_i - s_j).cwiseAbs();
  o += h;
  out.segment(o, h) = s_i.cwiseProduct(s_j);
  o += h;
  out[o++] = deg_i;
  out[o++] = deg_j;
  out.segment(o, rbf.n_basis) = rbf_encode(distance, rbf);
  o += rbf.n_basis;
  out.segment(o, dc) = c_i;
  o += dc;
  out.segment(o, dc) = c_j;
  o += dc;
  out[o++] = t;
  out[o++] = hyp_distance;
  return out;
}

}  // namespace hierflow
