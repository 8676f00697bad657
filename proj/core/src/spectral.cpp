//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/spectral.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierflow/error.h"

namespace hierflow {
namespace {
  // Deterministic start vectors; the k-th one is a fixed quasi-random
  // sequence so restarts do not repeat.
  Eigen::VectorXd start_vector(int n, int k) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v[i] = std::sin(1.0 + 0.7548776662 * (i + 1) + 0.5698402910 * k * (i + 3));
    return v;
  }

  // Removes components along the ones vector and the basis, twice.
  void orthogonalize(Eigen::VectorXd &w, const Eigen::MatrixXd &q, int cols) {
    const int n = static_cast<int>(w.size());
    for (int pass = 0; pass < 2; ++pass) {
      w.array() -= w.sum() / n;
      for (int c = 0; c < cols; ++c)
        w -= q.col(c).dot(w) * q.col(c);
    }
  }
}  // namespace

Eigen::MatrixXd laplacian(const Eigen::MatrixXd &weights) {
  if (weights.rows() != weights.cols())
    throw std::invalid_argument("laplacian: weight matrix must be square");
  Eigen::MatrixXd lap = -weights;
  lap.diagonal().setZero();
  for (int i = 0; i < lap.rows(); ++i)
    lap(i, i) = -lap.row(i).sum();
  return lap;
}

Lambda2Result algebraic_connectivity(const Eigen::MatrixXd &lap,
                                     const LanczosOptions &opts) {
  const int n = static_cast<int>(lap.rows());
  if (lap.cols() != n)
    throw std::invalid_argument("algebraic_connectivity: matrix not square");
  if (n < 2) {
    Lambda2Result r;
    r.vectors = Eigen::MatrixXd::Zero(n, 0);
    return r;
  }
  if (!lap.allFinite())
    throw NumericalError("algebraic_connectivity: non-finite Laplacian");

  const int dim = n - 1;
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : dim;
  const double scale = std::max(1.0, lap.cwiseAbs().maxCoeff());
  const double breakdown = 1e-10 * scale;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, dim);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(dim);

  int m = 0;
  int restarts = 0;
  int iterations = 0;
  Eigen::VectorXd v;
  while (m < dim && iterations < max_iter) {
    if (m == 0 || beta[m - 1] == 0.0) {
      // Fresh block: pick a start vector with a usable component.
      for (;; ++restarts) {
        v = start_vector(n, restarts);
        orthogonalize(v, q, m);
        if (v.norm() > 1e-6)
          break;
        if (restarts > 4 * n)
          throw NumericalError("algebraic_connectivity: restart failed after "
                               + std::to_string(iterations) + " iterations");
      }
      ++restarts;
      v.normalize();
    }
    q.col(m) = v;
    Eigen::VectorXd w = lap * v;
    alpha[m] = v.dot(w);
    w -= alpha[m] * v;
    if (m > 0)
      w -= beta[m - 1] * q.col(m - 1);
    orthogonalize(w, q, m + 1);
    ++iterations;
    const double b = w.norm();
    if (m + 1 < dim) {
      if (b > breakdown) {
        beta[m] = b;
        v = w / b;
      } else {
        beta[m] = 0.0;
      }
    }
    ++m;
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    t(k, k) = alpha[k];
    if (k + 1 < m)
      t(k, k + 1) = t(k + 1, k) = beta[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
  if (eig.info() != Eigen::Success)
    throw NumericalError("algebraic_connectivity: tridiagonal solve failed "
                         "after " + std::to_string(iterations) + " iterations");

  const Eigen::VectorXd &vals = eig.eigenvalues();
  const double lambda = vals[0];
  int cluster = 1;
  while (cluster < m
         && vals[cluster] - lambda <= opts.cluster_tolerance * scale)
    ++cluster;

  Lambda2Result out;
  out.value = lambda;
  out.iterations = iterations;
  out.vectors = q.leftCols(m) * eig.eigenvectors().leftCols(cluster);
  for (int c = 0; c < cluster; ++c) {
    out.vectors.col(c).normalize();
    const double resid =
        (lap * out.vectors.col(c) - lambda * out.vectors.col(c)).norm();
    if (!(resid <= opts.tolerance * scale * std::sqrt(n))) {
      throw NumericalError(
          "algebraic_connectivity: no convergence after "
          + std::to_string(iterations) + " iterations (residual "
          + std::to_string(resid) + ")");
    }
  }
  return out;
}

}  // namespace hierflow
