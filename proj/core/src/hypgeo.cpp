//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "hierflow/hypgeo.h"

#include <cmath>
#include <stdexcept>

namespace hierflow {
namespace {
  void check_curvature(double c) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("curvature must be positive");
  }

  void check_inside(const Eigen::VectorXd &u, double c) {
    if (!u.allFinite() || c * u.squaredNorm() >= 1.0)
      throw std::invalid_argument("point is not strictly inside the ball");
  }

  double sigmoid(double x) {
    if (x >= 0)
      return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  }
}  // namespace

Eigen::VectorXd exp_map_origin(const Eigen::VectorXd &v, double c) {
  check_curvature(c);
  if (!v.allFinite())
    throw std::invalid_argument("exp_map_origin: non-finite tangent vector");
  const double sc = std::sqrt(c);
  const double norm = v.norm();
  if (norm == 0.0)
    return Eigen::VectorXd::Zero(v.size());
  return clamp_to_ball(std::tanh(sc * norm) / (sc * norm) * v, c);
}

bool in_ball(const Eigen::VectorXd &u, double c) {
  return u.allFinite() && c * u.squaredNorm() < 1.0;
}

Eigen::VectorXd clamp_to_ball(const Eigen::VectorXd &u, double c) {
  check_curvature(c);
  const double limit = 1.0 - kBallMargin;
  const double r2 = c * u.squaredNorm();
  if (r2 < limit)
    return u;
  return u * std::sqrt(limit / r2);
}

double poincare_distance(const Eigen::VectorXd &u, const Eigen::VectorXd &v,
                         double c) {
  return poincare_distance_grad(u, v, c).distance;
}

DistanceGrad poincare_distance_grad(const Eigen::VectorXd &u,
                                    const Eigen::VectorXd &v, double c) {
  check_curvature(c);
  if (u.size() != v.size())
    throw std::invalid_argument("poincare_distance: dimension mismatch");
  check_inside(u, c);
  check_inside(v, c);

  DistanceGrad out;
  out.du = Eigen::VectorXd::Zero(u.size());
  out.dv = Eigen::VectorXd::Zero(v.size());
  const Eigen::VectorXd diff = u - v;
  const double diff2 = diff.squaredNorm();
  if (std::sqrt(diff2) < kCoincidentTol)
    return out;

  const double alpha = 1.0 - c * u.squaredNorm();
  const double beta = 1.0 - c * v.squaredNorm();
  const double x = 1.0 + 2.0 * c * diff2 / (alpha * beta);
  const double sc = std::sqrt(c);
  out.distance = std::acosh(x) / sc;

  const double xm = std::sqrt((x - 1.0) * (x + 1.0));
  if (xm == 0.0)
    return out;
  const double dd_dx = 1.0 / (sc * xm);
  const double k = 4.0 * c / (alpha * beta);
  out.du = dd_dx * k * (diff + c * diff2 / alpha * u);
  out.dv = dd_dx * k * (-diff + c * diff2 / beta * v);
  return out;
}

Eigen::MatrixXd pairwise_poincare(const Eigen::MatrixXd &pts, double c) {
  const int n = static_cast<int>(pts.rows());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = poincare_distance(pts.row(i).transpose(),
                                            pts.row(j).transpose(), c);
    }
  }
  return d;
}

double hierarchy_similarity(double d, double d_thresh, double tau) {
  if (!(tau > 0.0))
    throw std::invalid_argument("hierarchy_similarity: tau must be positive");
  return sigmoid((d_thresh - d) / tau);
}

double hierarchy_similarity_slope(double d, double d_thresh, double tau) {
  const double s = hierarchy_similarity(d, d_thresh, tau);
  return -s * (1.0 - s) / tau;
}

}  // namespace hierflow
