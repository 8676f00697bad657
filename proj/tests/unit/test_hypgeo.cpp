//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hierflow/hypgeo.h"

namespace hierflow {
namespace {

Eigen::VectorXd random_point(std::mt19937_64 &rng, int dim, double c,
                             double max_radius = 0.95) {
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(0, max_radius);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k)
    v[k] = g(rng);
  return v.normalized() * u(rng) / std::sqrt(c);
}

TEST(ExpMap, Examples) {
  EXPECT_EQ(exp_map_origin(Eigen::VectorXd::Zero(4), 1.0).norm(), 0.0);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
  e1[0] = 1.0;
  const Eigen::VectorXd u = exp_map_origin(e1, 1.0);
  EXPECT_NEAR(u.norm(), std::tanh(1.0), 1e-15);
  EXPECT_NEAR(u.norm(), 0.76159, 1e-5);
  EXPECT_THROW(exp_map_origin(e1, 0.0), std::invalid_argument);
}

TEST(ExpMap, DirectionAndNormMonotone) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g(0, 3);
  for (double c: { 0.5, 1.0, 2.0 }) {
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd v(8);
      for (int k = 0; k < 8; ++k)
        v[k] = g(rng);
      const Eigen::VectorXd u1 = exp_map_origin(v, c);
      const Eigen::VectorXd u2 = exp_map_origin(1.3 * v, c);
      EXPECT_NEAR(u1.normalized().dot(v.normalized()), 1.0, 1e-12);
      EXPECT_LT(u1.norm(), u2.norm() + 1e-15);
      EXPECT_LT(u2.norm(), 1.0 / std::sqrt(c));
      EXPECT_TRUE(in_ball(u1, c));
    }
  }
}

TEST(PoincareDistance, Examples) {
  const Eigen::VectorXd o = Eigen::VectorXd::Zero(4);
  EXPECT_EQ(poincare_distance(o, o, 1.0), 0.0);
  Eigen::VectorXd u = o;
  u[0] = 0.5;
  EXPECT_NEAR(poincare_distance(u, o, 1.0), std::log(3.0), 1e-12);
  EXPECT_NEAR(poincare_distance(u, o, 1.0), 1.09861, 1e-5);

  Eigen::VectorXd outside = o;
  outside[1] = 1.0;
  EXPECT_THROW(poincare_distance(outside, o, 1.0), std::invalid_argument);
  EXPECT_THROW(poincare_distance(u, Eigen::VectorXd::Zero(3), 1.0),
               std::invalid_argument);
}

TEST(PoincareDistance, OriginIdentity) {
  std::mt19937_64 rng(67);
  for (double c: { 0.5, 1.0, 2.0 }) {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd u = random_point(rng, 16, c, 0.999);
      const Eigen::VectorXd o = Eigen::VectorXd::Zero(16);
      EXPECT_NEAR(poincare_distance(u, o, c),
                  2.0 / std::sqrt(c) * std::atanh(std::sqrt(c) * u.norm()),
                  1e-9);
    }
  }
}

TEST(PoincareDistance, MetricAxioms) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    const double c = trial % 2 ? 1.0 : 2.0;
    const Eigen::VectorXd a = random_point(rng, 5, c);
    const Eigen::VectorXd b = random_point(rng, 5, c);
    const Eigen::VectorXd x = random_point(rng, 5, c);
    const double ab = poincare_distance(a, b, c);
    EXPECT_NEAR(ab, poincare_distance(b, a, c), 1e-12);
    EXPECT_EQ(poincare_distance(a, a, c), 0.0);
    EXPECT_LE(ab, poincare_distance(a, x, c) + poincare_distance(x, b, c)
                      + 1e-9);
  }
}

TEST(PoincareDistance, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(73);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const double c = 1.0 + 0.5 * (trial % 3);
    const Eigen::VectorXd u = random_point(rng, 6, c, 0.8);
    const Eigen::VectorXd v = random_point(rng, 6, c, 0.8);
    const DistanceGrad g = poincare_distance_grad(u, v, c);
    for (int k = 0; k < 6; ++k) {
      Eigen::VectorXd up = u, um = u, vp = v, vm = v;
      up[k] += h;
      um[k] -= h;
      vp[k] += h;
      vm[k] -= h;
      const double fu =
          (poincare_distance(up, v, c) - poincare_distance(um, v, c)) / (2 * h);
      const double fv =
          (poincare_distance(u, vp, c) - poincare_distance(u, vm, c)) / (2 * h);
      EXPECT_LT(std::abs(g.du[k] - fu), 1e-6 * std::max(1.0, std::abs(fu)));
      EXPECT_LT(std::abs(g.dv[k] - fv), 1e-6 * std::max(1.0, std::abs(fv)));
    }
  }
}

TEST(PoincareDistance, CoincidentPointsHaveZeroGradient) {
  Eigen::VectorXd u = Eigen::VectorXd::Constant(3, 0.2);
  const DistanceGrad g = poincare_distance_grad(u, u, 1.0);
  EXPECT_EQ(g.distance, 0.0);
  EXPECT_EQ(g.du.norm(), 0.0);
  EXPECT_EQ(g.dv.norm(), 0.0);
}

TEST(PoincareDistance, PairwiseMatrix) {
  std::mt19937_64 rng(79);
  Eigen::MatrixXd pts(4, 3);
  for (int r = 0; r < 4; ++r)
    pts.row(r) = random_point(rng, 3, 1.0).transpose();
  const Eigen::MatrixXd d = pairwise_poincare(pts, 1.0);
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      EXPECT_NEAR(d(r, s),
                  poincare_distance(pts.row(r).transpose(),
                                    pts.row(s).transpose(), 1.0),
                  1e-14);
}

TEST(ClampToBall, RescalesOntoShell) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
  u[0] = 3.0;
  const Eigen::VectorXd clamped = clamp_to_ball(u, 1.0);
  EXPECT_NEAR(clamped.squaredNorm(), 1.0 - kBallMargin, 1e-15);
  EXPECT_TRUE(in_ball(clamped, 1.0));
  Eigen::VectorXd inside = u / 10;
  EXPECT_EQ(clamp_to_ball(inside, 1.0), inside);
}

TEST(HierarchySimilarity, Examples) {
  EXPECT_DOUBLE_EQ(hierarchy_similarity(4.0), 0.5);
  EXPECT_NEAR(hierarchy_similarity(0.0), 1.0 / (1.0 + std::exp(-4.0)), 1e-15);
  EXPECT_NEAR(hierarchy_similarity(0.0), 0.98201, 1e-5);
  EXPECT_LT(hierarchy_similarity(1e3), 1e-300 + 1e-12);
  EXPECT_THROW(hierarchy_similarity(1.0, 4.0, 0.0), std::invalid_argument);
  double prev = 1.0;
  for (double d = 0; d < 10; d += 0.25) {
    const double s = hierarchy_similarity(d, 3.0, 0.7);
    EXPECT_LT(s, prev);
    const double h = 1e-6;
    EXPECT_NEAR(hierarchy_similarity_slope(d, 3.0, 0.7),
                (hierarchy_similarity(d + h, 3.0, 0.7)
                 - hierarchy_similarity(d - h, 3.0, 0.7))
                    / (2 * h),
                1e-8);
    prev = s;
  }
}

}  // namespace
}  // namespace hierflow
