//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "hierflow/error.h"
#include "hierflow/relaxed_state.h"

namespace hierflow {
namespace {

// State with one-hot bond probabilities given per pair.
RelaxedState bond_state(int n, const std::vector<int> &categories, int k = 5) {
  RelaxedState s = RelaxedState::zeros({ n, 3, k, 1, 1 });
  for (int p = 0; p < num_pairs(n); ++p) {
    s.bond_logits.row(p).setConstant(-40.0);
    s.bond_logits(p, categories[p]) = 0.0;
  }
  s.refresh_probabilities();
  return s;
}

TEST(PairIndex, Bijection) {
  for (int n = 2; n <= 9; ++n) {
    std::set<int> seen;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int p = pair_index(i, j, n);
        EXPECT_EQ(p, pair_index(j, i, n));
        EXPECT_EQ(pair_atoms(p, n), std::make_pair(i, j));
        seen.insert(p);
      }
    }
    EXPECT_EQ(static_cast<int>(seen.size()), num_pairs(n));
    EXPECT_EQ(*seen.rbegin(), num_pairs(n) - 1);
  }
}

TEST(ExpectedBondOrder, Examples) {
  const BondOrders orders = BondOrders::with_aromatic();
  Eigen::VectorXd x(5);
  x << 0, 1, 0, 0, 0;
  EXPECT_DOUBLE_EQ(expected_bond_order(x, orders), 1.0);
  x << 0.5, 0, 0.5, 0, 0;
  EXPECT_DOUBLE_EQ(expected_bond_order(x, orders), 1.0);
  x << 0, 0, 0, 0, 1;
  EXPECT_DOUBLE_EQ(expected_bond_order(x, orders), 1.5);
  EXPECT_THROW(expected_bond_order(Eigen::VectorXd::Ones(4), orders),
               std::invalid_argument);
}

TEST(ExpectedBondOrder, Linear) {
  const BondOrders orders = BondOrders::with_aromatic();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(5), b(5);
    for (int k = 0; k < 5; ++k) {
      a[k] = u(rng);
      b[k] = u(rng);
    }
    a /= a.sum();
    b /= b.sum();
    const double w = u(rng);
    EXPECT_NEAR(expected_bond_order(w * a + (1 - w) * b, orders),
                w * expected_bond_order(a, orders)
                    + (1 - w) * expected_bond_order(b, orders),
                1e-12);
  }
}

TEST(SoftDegree, Examples) {
  const BondOrders orders = BondOrders::with_aromatic();
  const RelaxedState ring = bond_state(3, { 1, 1, 1 });
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(soft_degree(ring, i, orders), 2.0, 1e-12);

  const RelaxedState empty = bond_state(3, { 0, 0, 0 });
  EXPECT_NEAR(soft_degree(empty, 1, orders), 0.0, 1e-12);

  // Pairs (0,1), (0,2), (1,2): atom 0 carries a single and a double.
  const RelaxedState mixed = bond_state(3, { 1, 2, 0 });
  EXPECT_NEAR(soft_degree(mixed, 0, orders), 3.0, 1e-12);
  EXPECT_NEAR(soft_degrees(mixed, orders)[0], 3.0, 1e-12);
  EXPECT_THROW(soft_degree(mixed, 3, orders), std::out_of_range);
}

TEST(SoftDegree, MaskedAtomsContributeNothing) {
  const BondOrders orders = BondOrders::with_aromatic();
  RelaxedState s = bond_state(3, { 1, 1, 1 });
  s.atom_mask[2] = false;
  s.refresh_probabilities();
  EXPECT_NEAR(soft_degree(s, 0, orders), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(soft_degree(s, 2, orders), 0.0);
  EXPECT_NEAR(s.bond_probs(pair_index(0, 2, 3), 0), 1.0, 1e-12);
}

TEST(Recenter, Examples) {
  Eigen::MatrixX3d r(2, 3);
  r << 1, 1, 1, 3, 1, 1;
  Eigen::MatrixX3d expected(2, 3);
  expected << -1, 0, 0, 1, 0, 0;
  EXPECT_TRUE(recenter(r).isApprox(expected, 1e-14));
  EXPECT_TRUE(recenter(expected).isApprox(expected, 1e-14));

  Eigen::MatrixX3d single(1, 3);
  single << 5, 0, 0;
  EXPECT_NEAR(recenter(single).norm(), 0.0, 1e-15);
  EXPECT_THROW(recenter(r, { false, false }), std::invalid_argument);
}

TEST(Recenter, IdempotentAndDistancePreserving) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixX3d r(7, 3);
    for (int i = 0; i < 7; ++i)
      for (int d = 0; d < 3; ++d)
        r(i, d) = g(rng) + 10;
    const Eigen::MatrixX3d c = recenter(r);
    EXPECT_LT(c.colwise().mean().norm(), 1e-12);
    EXPECT_TRUE(recenter(c).isApprox(c, 1e-12));
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j)
        EXPECT_NEAR((c.row(i) - c.row(j)).norm(),
                    (r.row(i) - r.row(j)).norm(), 1e-12);
  }
}

TEST(LogitsToProbs, Examples) {
  EXPECT_TRUE(logits_to_probs(Eigen::Vector3d::Zero())
                  .isApprox(Eigen::Vector3d::Constant(1.0 / 3), 1e-15));
  const Eigen::Vector3d z(0.3, -1.2, 2.0);
  EXPECT_TRUE(logits_to_probs(z).isApprox(
      logits_to_probs(z + Eigen::Vector3d::Constant(7)), 1e-14));
  const Eigen::VectorXd p = logits_to_probs(Eigen::Vector3d(10, 0, 0));
  EXPECT_NEAR(p[0], 1.0 / (1.0 + 2.0 * std::exp(-10.0)), 1e-15);
  EXPECT_NEAR(p[0], 0.99991, 1e-5);

  Eigen::Vector3d bad(0, NAN, 0);
  EXPECT_THROW(logits_to_probs(bad), NumericalError);
  EXPECT_TRUE(logits_to_probs(Eigen::Vector3d(1e6, -1e6, 0)).allFinite());
}

TEST(ProbsToLogits, RoundTripMatchesClipRenormalize) {
  const double eps = 1e-6;
  Eigen::Vector3d onehot(1, 0, 0);
  Eigen::Vector3d clipped(1 - eps, eps, eps);
  clipped /= clipped.sum();
  EXPECT_TRUE(logits_to_probs(probs_to_logits(onehot, eps))
                  .isApprox(clipped, 1e-12));
  EXPECT_LT((logits_to_probs(probs_to_logits(onehot, eps)) - clipped)
                .cwiseAbs()
                .maxCoeff(),
            1e-9);

  const Eigen::VectorXd uniform = probs_to_logits(Eigen::Vector4d::Constant(0.25));
  EXPECT_NEAR(uniform.maxCoeff() - uniform.minCoeff(), 0.0, 1e-15);

  Eigen::Vector3d boundary(eps, 0.5, 0.5 - eps);
  EXPECT_TRUE(probs_to_logits(boundary, eps).allFinite());
  EXPECT_THROW(probs_to_logits(Eigen::Vector2d(-0.1, 1.1)),
               std::invalid_argument);
}

TEST(ProbsToLogits, IdentityOnClippedDistributions) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd p(6);
    for (int k = 0; k < 6; ++k)
      p[k] = u(rng);
    p /= p.sum();
    EXPECT_LT((logits_to_probs(probs_to_logits(p)) - p).cwiseAbs().maxCoeff(),
              1e-9);
  }
}

TEST(SoftmaxBackward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0, 2);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd z(5), w(5);
    for (int k = 0; k < 5; ++k) {
      z[k] = g(rng);
      w[k] = g(rng);
    }
    const Eigen::VectorXd p = logits_to_probs(z);
    const Eigen::VectorXd analytic = softmax_backward(p, w);
    EXPECT_NEAR(analytic.sum(), 0.0, 1e-12);
    for (int k = 0; k < 5; ++k) {
      const double h = 1e-6;
      Eigen::VectorXd zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      const double fd =
          (logits_to_probs(zp).dot(w) - logits_to_probs(zm).dot(w)) / (2 * h);
      EXPECT_NEAR(analytic[k], fd, 1e-8);
    }
  }
}

TEST(RelaxedState, RefreshKeepsSimplexAndCausality) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0, 20);
  RelaxedState s = RelaxedState::zeros({ 4, 3, 5, 6, 4 });
  s.token_mask[3] = false;
  s.atom_mask[3] = false;
  for (int r = 0; r < s.bond_logits.rows(); ++r)
    for (int c = 0; c < 5; ++c)
      s.bond_logits(r, c) = g(rng);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      s.parent_logits(r, c) = g(rng);
  s.refresh_probabilities();
  EXPECT_LT(s.simplex_violation(), 1e-12);
  for (int alpha = 1; alpha < 6; ++alpha) {
    for (int beta = alpha; beta < 6; ++beta)
      EXPECT_EQ(s.parent_probs(alpha, beta), 0.0);
    if (alpha > 3) {
      EXPECT_EQ(s.parent_probs(alpha, 3), 0.0);
    }
  }
  EXPECT_NEAR(s.parent_probs(3, 0), 1.0, 1e-15);
  EXPECT_EQ(s.parent_probs.row(0).norm(), 0.0);
}

}  // namespace
}  // namespace hierflow
