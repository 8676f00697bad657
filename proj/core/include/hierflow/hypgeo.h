//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_HYPGEO_H_
#define HIERFLOW_HYPGEO_H_

#include <Eigen/Dense>

namespace hierflow {

inline constexpr double kBallMargin = 1e-7;
inline constexpr double kCoincidentTol = 1e-12;

struct HyperbolicConfig {
  int dim = 16;
  double curvature = 1.0;
  double d_thresh = 4.0;
  double tau = 1.0;
};

// Maps a tangent vector at the origin into the Poincare ball of curvature c.
Eigen::VectorXd exp_map_origin(const Eigen::VectorXd &v, double c);

bool in_ball(const Eigen::VectorXd &u, double c);

// Radially rescales points with c|u|^2 >= 1 - kBallMargin onto that shell.
Eigen::VectorXd clamp_to_ball(const Eigen::VectorXd &u, double c);

// Throws std::invalid_argument for points on or outside the boundary.
double poincare_distance(const Eigen::VectorXd &u, const Eigen::VectorXd &v,
                         double c);

struct DistanceGrad {
  double distance = 0.0;
  Eigen::VectorXd du;
  Eigen::VectorXd dv;
};

// Distance and its gradient in both arguments. Points closer than
// kCoincidentTol get distance 0 and zero gradients.
DistanceGrad poincare_distance_grad(const Eigen::VectorXd &u,
                                    const Eigen::VectorXd &v, double c);

// Row-wise pairwise distances of the points in `pts`.
Eigen::MatrixXd pairwise_poincare(const Eigen::MatrixXd &pts, double c);

double hierarchy_similarity(double d, double d_thresh = 4.0, double tau = 1.0);

// d/dd of hierarchy_similarity.
double hierarchy_similarity_slope(double d, double d_thresh = 4.0,
                                  double tau = 1.0);

}  // namespace hierflow

#endif  // HIERFLOW_HYPGEO_H_
