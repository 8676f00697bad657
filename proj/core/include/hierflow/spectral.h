//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_SPECTRAL_H_
#define HIERFLOW_SPECTRAL_H_

#include <Eigen/Dense>

namespace hierflow {

// Weighted graph Laplacian D - W of a symmetric, zero-diagonal weight matrix.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd &weights);

struct Lambda2Result {
  double value = 0.0;
  // Orthonormal eigenvectors spanning the (possibly degenerate) eigenspace
  // of value, one per column.
  Eigen::MatrixXd vectors;
  int iterations = 0;
};

struct LanczosOptions {
  int max_iterations = 0;  // 0: dimension of the deflated space
  double tolerance = 1e-10;
  double cluster_tolerance = 1e-9;
};

/**
 * @brief Second-smallest eigenvalue of a graph Laplacian.
 *
 * Lanczos with full reorthogonalization on the complement of the all-ones
 * vector. A breakdown restarts from a fresh vector orthogonal to the current
 * basis, so disconnected graphs are handled. Throws NumericalError with the
 * iteration count when the residual of the returned pair exceeds the
 * tolerance.
 */
Lambda2Result algebraic_connectivity(const Eigen::MatrixXd &lap,
                                     const LanczosOptions &opts = {});

}  // namespace hierflow

#endif  // HIERFLOW_SPECTRAL_H_
