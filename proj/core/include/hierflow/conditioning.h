//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_CONDITIONING_H_
#define HIERFLOW_CONDITIONING_H_

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hierflow {

inline constexpr double kAttentionEps = 1e-8;

// Distance bias b(delta) = a - b * delta.
struct LinearBias {
  double a = 0.0;
  double b = 1.0;

  double operator()(double delta) const { return a - b * delta; }
};

struct AttentionInputs {
  Eigen::MatrixXd queries;    // N x d
  Eigen::MatrixXd keys;       // A x d
  Eigen::MatrixXd values;     // A x d_v
  Eigen::MatrixXd distances;  // N x A hyperbolic distances
  Eigen::MatrixXd ancestor;   // N x A soft ancestor mask
  std::vector<bool> token_mask;
  std::function<double(double)> bias = LinearBias {};
  double eps = kAttentionEps;
};

struct AttentionResult {
  Eigen::MatrixXd weights;   // N x A, zero on masked tokens
  Eigen::MatrixXd contexts;  // N x d_v
};

// Single-head attention with score q.k / sqrt(d) + bias(delta) +
// log(pi + eps). Masked tokens are excluded before the softmax.
AttentionResult masked_attention(const AttentionInputs &in);

struct RbfConfig {
  int n_basis = 32;
  double d_min = 0.0;
  double d_max = 10.0;

  double spacing() const { return (d_max - d_min) / (n_basis - 1); }
  double center(int m) const { return d_min + m * spacing(); }
};

Eigen::VectorXd rbf_encode(double d, const RbfConfig &cfg = {});

// Derivative of rbf_encode with respect to d.
Eigen::VectorXd rbf_derivative(double d, const RbfConfig &cfg = {});

int edge_descriptor_size(int state_dim, int context_dim, int n_basis);

/**
 * @brief Edge feature vector for the pair (i, j).
 *
 * Layout: [|s_i - s_j|, s_i * s_j, deg_i, deg_j, rbf(|r_i - r_j|), c_i, c_j,
 * t, delta_ij].
 */
Eigen::VectorXd edge_descriptor(const Eigen::VectorXd &s_i,
                                const Eigen::VectorXd &s_j, double deg_i,
                                double deg_j, double distance,
                                const Eigen::VectorXd &c_i,
                                const Eigen::VectorXd &c_j, double t,
                                double hyp_distance,
                                const RbfConfig &rbf = {});

}  // namespace hierflow

#endif  // HIERFLOW_CONDITIONING_H_
