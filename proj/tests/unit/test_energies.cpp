//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <array>
#include <random>

#include <gtest/gtest.h>

#include "hierflow/energies.h"
#include "hierflow/gradcheck.h"
#include "hierflow/spectral.h"
#include "oracles.h"

namespace hierflow {
namespace {

constexpr double kOff = -800.0;  // exp underflows to exactly zero

class EnergyTest: public ::testing::Test {
protected:
  ElementTable table = ElementTable::defaults();
  BondOrders orders = BondOrders::with_aromatic();
  EnergyConfig config;

  int H = table.index_of("H");
  int C = table.index_of("C");
  int N = table.index_of("N");

  EnergyModel model() const { return EnergyModel(table, orders, config); }

  // One-hot elements, bond categories per pair, coordinates along x.
  RelaxedState state(const std::vector<int> &elements,
                     const std::vector<int> &bonds) const {
    const int n = static_cast<int>(elements.size());
    RelaxedState s = RelaxedState::zeros({ n, table.size(), orders.size(), 1, 1 });
    s.atom_logits.setConstant(kOff);
    for (int i = 0; i < n; ++i) {
      s.atom_logits(i, elements[i]) = 0.0;
      s.coords(i, 0) = 3.0 * i;
    }
    s.bond_logits.setConstant(kOff);
    for (int p = 0; p < num_pairs(n); ++p)
      s.bond_logits(p, bonds.empty() ? 0 : bonds[p]) = 0.0;
    s.refresh_probabilities();
    return s;
  }

  // Existence probability p as a mixture of no-bond and single.
  static void set_existence(RelaxedState &s, int i, int j, double p) {
    const int q = pair_index(i, j, s.num_atoms());
    s.bond_logits.row(q).setConstant(kOff);
    s.bond_logits(q, 0) = p < 1 ? std::log(1 - p) : kOff;
    s.bond_logits(q, 1) = p > 0 ? std::log(p) : kOff;
    s.refresh_probabilities();
  }

  static std::vector<int> bonds_for(int n,
                                    const std::vector<std::array<int, 3>> &list) {
    std::vector<int> out(num_pairs(n), 0);
    for (auto [i, j, k]: list)
      out[pair_index(i, j, n)] = k;
    return out;
  }

  static Eigen::MatrixXd existence(const RelaxedState &s) {
    const int n = s.num_atoms();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        w(i, j) = w(j, i) = 1 - s.bond_probs(pair_index(i, j, n), 0);
    return w;
  }
};

TEST_F(EnergyTest, SoftElementConstant) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(table.size());
  alpha[C] = 1;
  EXPECT_DOUBLE_EQ(soft_element_constant(alpha, ElementColumn::kMaxValence, table), 4);
  alpha[C] = alpha[N] = 0.5;
  EXPECT_DOUBLE_EQ(soft_element_constant(alpha, ElementColumn::kMaxValence, table), 3.5);
  alpha.setZero();
  alpha[C] = alpha[H] = 0.5;
  EXPECT_DOUBLE_EQ(
      soft_element_constant(alpha, ElementColumn::kCovalentRadius, table),
      0.5 * (table[C].covalent_radius + table[H].covalent_radius));
  EXPECT_THROW(soft_element_constant(Eigen::VectorXd::Ones(3),
                                     ElementColumn::kVdwRadius, table),
               std::invalid_argument);
}

TEST_F(EnergyTest, ValenceExamples) {
  const EnergyModel m = model();
  const RelaxedState ok = state({ C, C, N }, bonds_for(3, { { 0, 1, 2 }, { 1, 2, 1 } }));
  EXPECT_EQ(m.term(EnergyTerm::kValence, ok), 0.0);

  const RelaxedState over = state(
      { C, H, H, H, H, H },
      bonds_for(6, { { 0, 1, 1 }, { 0, 2, 1 }, { 0, 3, 1 }, { 0, 4, 1 }, { 0, 5, 1 } }));
  EXPECT_NEAR(m.term(EnergyTerm::kValence, over), 1.0, 1e-12);
}

TEST_F(EnergyTest, ValenceGradientLowersBondOrder) {
  const EnergyModel m = model();
  RelaxedState s = state({ H, H }, {});
  s.bond_logits.row(0) << std::log(0.1), std::log(0.3), std::log(0.6), kOff, kOff;
  s.refresh_probabilities();
  ASSERT_GT(soft_degree(s, 0, orders), 1.0);

  StateGradient g;
  const double e0 = m.term(EnergyTerm::kValence, s, {}, &g);
  RelaxedState step = s;
  step.bond_logits -= 1e-3 * g.bond;
  step.refresh_probabilities();
  EXPECT_LT(m.term(EnergyTerm::kValence, step), e0);
  EXPECT_LT(soft_degree(step, 0, orders), soft_degree(s, 0, orders));
  EXPECT_GT(g.bond(0, 2), 0.0);
  EXPECT_LT(g.bond(0, 0), 0.0);
}

TEST_F(EnergyTest, CountExamples) {
  config.m_target = { { 4, 2.0 } };
  const EnergyModel m = model();
  RelaxedState s = state({ C, C, C, C }, bonds_for(4, { { 0, 1, 1 }, { 2, 3, 1 } }));
  EXPECT_NEAR(m.term(EnergyTerm::kCount, s), 0.0, 1e-20);

  s = state({ C, C, C, C },
            bonds_for(4, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 }, { 0, 3, 1 } }));
  EXPECT_NEAR(m.term(EnergyTerm::kCount, s), 4.0, 1e-12);

  bool fallback = false;
  EXPECT_EQ(config.target_edges(4, &fallback), 2.0);
  EXPECT_FALSE(fallback);
  EXPECT_EQ(config.target_edges(7, &fallback), 6.0);
  EXPECT_TRUE(fallback);
}

TEST_F(EnergyTest, CountGradientFavoursNoBondWhenOverTarget) {
  config.m_target = { { 3, 0.5 } };
  const EnergyModel m = model();
  RelaxedState s = state({ C, C, C }, {});
  set_existence(s, 0, 1, 0.7);
  set_existence(s, 1, 2, 0.6);
  set_existence(s, 0, 2, 0.2);
  StateGradient g;
  m.term(EnergyTerm::kCount, s, {}, &g);
  // Descent raises the no-bond logit, so its gradient is negative.
  for (int p = 0; p < 3; ++p)
    EXPECT_LT(g.bond(p, 0), 0.0);
  EXPECT_EQ(g.atom.norm(), 0.0);
  EXPECT_EQ(g.coords.norm(), 0.0);

  const double h = 1e-6;
  RelaxedState plus = s, minus = s;
  plus.bond_logits(0, 0) += h;
  minus.bond_logits(0, 0) -= h;
  plus.refresh_probabilities();
  minus.refresh_probabilities();
  EXPECT_NEAR((m.term(EnergyTerm::kCount, plus) - m.term(EnergyTerm::kCount, minus)) / (2 * h),
              g.bond(0, 0), 1e-7);
}

TEST_F(EnergyTest, ConnLogdetTwoAtoms) {
  const EnergyModel m = model();
  RelaxedState s = state({ C, C }, {});
  EXPECT_NEAR(m.term(EnergyTerm::kConnLogdet, s), -2.0 * std::log(1e-3), 1e-9);
  EXPECT_NEAR(m.term(EnergyTerm::kConnLogdet, s), 13.8155, 1e-4);

  s = state({ C, C }, { 1 });
  const double eps = 1e-3;
  EXPECT_NEAR(m.term(EnergyTerm::kConnLogdet, s), -std::log(2 * eps + eps * eps),
              1e-9);
  EXPECT_NEAR(m.term(EnergyTerm::kConnLogdet, s), 6.2141, 1e-4);
}

TEST_F(EnergyTest, ConnLogdetMatchesDenseDeterminantAndIsMonotone) {
  const EnergyModel m = model();
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    RelaxedState s = state(std::vector<int>(n, C), {});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        set_existence(s, i, j, u(rng) < 0.4 ? 0.0 : u(rng));
    Eigen::MatrixXd mat = laplacian(existence(s));
    mat.diagonal().array() += 1e-3;
    const double value = m.term(EnergyTerm::kConnLogdet, s);
    EXPECT_NEAR(value, -std::log(mat.determinant()), 1e-9);

    const int i = trial % n, j = (i + 1) % n;
    const double p = 1 - s.bond_probs(pair_index(i, j, n), 0);
    set_existence(s, i, j, p + (1 - p) * 0.5);
    EXPECT_LT(m.term(EnergyTerm::kConnLogdet, s), value);
  }
}

TEST_F(EnergyTest, DisconnectedAboveConnected) {
  const EnergyModel m = model();
  const RelaxedState path = state(
      { C, C, C, C }, bonds_for(4, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 } }));
  const RelaxedState split =
      state({ C, C, C, C }, bonds_for(4, { { 0, 1, 1 }, { 2, 3, 1 } }));
  EXPECT_GT(m.term(EnergyTerm::kConnLogdet, split),
            m.term(EnergyTerm::kConnLogdet, path));
  EXPECT_GT(m.term(EnergyTerm::kConnLambda2, split),
            m.term(EnergyTerm::kConnLambda2, path));
}

TEST_F(EnergyTest, ConnLambda2) {
  const EnergyModel m = model();
  const RelaxedState k3 = state({ C, C, C }, { 1, 1, 1 });
  EXPECT_NEAR(m.term(EnergyTerm::kConnLambda2, k3), 0.0, 1e-20);
  const RelaxedState empty = state({ C, C, C }, {});
  EXPECT_NEAR(m.term(EnergyTerm::kConnLambda2, empty), 1e-4, 1e-15);

  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 11;
    RelaxedState s = state(std::vector<int>(n, C), {});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        set_existence(s, i, j, u(rng) < 0.7 ? 0.0 : 0.02 * u(rng));
    const double lambda2 = testing::dense_lambda2(existence(s));
    const double gap = std::max(0.0, 1e-2 - lambda2);
    EXPECT_NEAR(m.term(EnergyTerm::kConnLambda2, s), gap * gap, 1e-12);
  }
}

TEST_F(EnergyTest, ConsistencyExamples) {
  const EnergyModel m = model();
  RelaxedState s = state({ C, C, C }, { 1, 0, 0 });
  EnergyInputs in;
  in.similarity = Eigen::MatrixXd::Zero(3, 3);
  EXPECT_NEAR(m.term(EnergyTerm::kConsistency, s, in), 1.0, 1e-12);
  in.similarity(0, 1) = 1.0;
  EXPECT_NEAR(m.term(EnergyTerm::kConsistency, s, in), 0.0, 1e-12);

  set_existence(s, 0, 1, 0.3);
  set_existence(s, 1, 2, 0.8);
  in.similarity(0, 1) = 0.9;
  in.similarity(1, 2) = 0.1;
  StateGradient g;
  m.term(EnergyTerm::kConsistency, s, in, &g);
  // Descent raises p toward s on (0,1) and lowers it on (1,2).
  EXPECT_GT(g.bond(pair_index(0, 1, 3), 0), 0.0);
  EXPECT_LT(g.bond(pair_index(1, 2, 3), 0), 0.0);
  EXPECT_THROW(m.term(EnergyTerm::kConsistency, s, EnergyInputs {}),
               std::invalid_argument);
}

TEST_F(EnergyTest, BondLengthExamples) {
  const EnergyModel m = model();
  const double rc = table[C].covalent_radius;
  RelaxedState s = state({ C, C }, { 1 });
  s.coords.setZero();
  s.coords(1, 0) = 2 * rc;
  EXPECT_NEAR(m.term(EnergyTerm::kBondLength, s), 0.0, 1e-24);

  s = state({ C, C }, { 2 });
  s.coords.setZero();
  s.coords(1, 0) = 0.93 * 2 * rc;
  EXPECT_NEAR(m.term(EnergyTerm::kBondLength, s), 0.0, 1e-24);
  s.coords(1, 0) = 2 * rc;
  EXPECT_NEAR(m.term(EnergyTerm::kBondLength, s), std::pow(0.07 * 2 * rc, 2),
              1e-12);
}

TEST_F(EnergyTest, StericExamples) {
  const EnergyModel m = model();
  RelaxedState s = state({ C, C }, {});
  s.coords(1, 0) = 50.0;
  EXPECT_LT(m.term(EnergyTerm::kSteric, s), 1e-100);
  EXPECT_DOUBLE_EQ(config.lambda_bond(0.5), 0.125);

  s.coords(1, 0) = 1.5;
  s.t = 0.5;
  const double unbonded = m.term(EnergyTerm::kSteric, s);
  set_existence(s, 0, 1, 1.0);
  EXPECT_NEAR(m.term(EnergyTerm::kSteric, s), 0.125 * unbonded, 1e-12);
  s.t = 1.0;
  EXPECT_NEAR(m.term(EnergyTerm::kSteric, s), 0.2 * unbonded, 1e-12);
}

TEST_F(EnergyTest, GeometryTermsAreRigidInvariant) {
  const EnergyModel m = model();
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 20; ++trial) {
    RelaxedState s = random_relaxed_state(rng, RandomStateOptions { 7 });
    std::normal_distribution<double> g(0, 1);
    Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
    q.normalize();
    const Eigen::RowVector3d shift(g(rng), g(rng), g(rng));
    RelaxedState moved = s;
    moved.coords = (s.coords * q.toRotationMatrix().transpose()).rowwise() + shift;
    for (EnergyTerm t: { EnergyTerm::kBondLength, EnergyTerm::kSteric })
      EXPECT_NEAR(m.term(t, moved), m.term(t, s), 1e-9);
  }
}

TEST_F(EnergyTest, HierConn) {
  const EnergyModel m = model();
  const RelaxedState s = state(
      { C, C, C, C, C, C },
      bonds_for(6, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 }, { 4, 5, 1 } }));
  EXPECT_EQ(m.term(EnergyTerm::kHierConn, s, EnergyInputs {}), 0.0);

  EnergyInputs connected, split;
  connected.motifs = { { 0, 1, 2, 3 } };
  split.motifs = { { 2, 3, 4, 5 } };
  EXPECT_GT(m.term(EnergyTerm::kHierConn, s, split),
            m.term(EnergyTerm::kHierConn, s, connected));

  const RelaxedState complete = state(std::vector<int>(4, C), { 1, 1, 1, 1, 1, 1 });
  EXPECT_LT(m.term(EnergyTerm::kHierConn, complete, connected),
            m.term(EnergyTerm::kHierConn, s, connected));

  EnergyInputs single;
  single.motifs = { { 4 } };
  EXPECT_NEAR(m.term(EnergyTerm::kHierConn, s, single), -std::log(1e-3), 1e-12);
}

TEST_F(EnergyTest, RingTerms) {
  const EnergyModel m = model();
  std::vector<std::array<int, 3>> ring = { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 },
                                           { 3, 4, 1 }, { 4, 5, 1 }, { 0, 5, 1 } };
  EnergyInputs in;
  in.rings = { { 0, 1, 2, 3, 4, 5 } };
  RelaxedState s = state(std::vector<int>(8, C), bonds_for(8, ring));
  EXPECT_NEAR(m.term(EnergyTerm::kRingClosure, s, in), 0.0, 1e-20);
  EXPECT_NEAR(m.term(EnergyTerm::kRingExclusivity, s, in), 0.0, 1e-20);

  set_existence(s, 2, 3, 0.0);
  EXPECT_NEAR(m.term(EnergyTerm::kRingClosure, s, in), 1.0, 1e-12);

  ring.push_back({ 0, 6, 1 });
  ring.push_back({ 0, 7, 1 });
  s = state(std::vector<int>(8, C), bonds_for(8, ring));
  EXPECT_NEAR(m.term(EnergyTerm::kRingExclusivity, s, in), 1.0, 1e-12);
}

TEST(Anneal, Examples) {
  EXPECT_DOUBLE_EQ(anneal(0.7, 2.0, 0.0), 0.7);
  EXPECT_DOUBLE_EQ(anneal(0.7, 2.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(anneal(0.7, 2.0, 0.5), 0.25 * 0.7);
}

TEST_F(EnergyTest, GradientsAreShiftInvariant) {
  config.hier_conn = config.ring_closure = config.ring_exclusivity = true;
  const EnergyModel m = model();
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 10; ++trial) {
    const RelaxedState s = random_relaxed_state(rng, RandomStateOptions { 6 });
    const EnergyInputs in = random_energy_inputs(rng, s);
    for (EnergyTerm t: kAllEnergyTerms) {
      StateGradient g;
      const double v = m.term(t, s, in, &g);
      EXPECT_LT(g.bond.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT(g.atom.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);

      RelaxedState shifted = s;
      shifted.bond_logits.array() += 3.0;
      shifted.atom_logits.array() -= 2.0;
      shifted.refresh_probabilities();
      EXPECT_NEAR(m.term(t, shifted, in), v, 1e-9 * std::max(1.0, std::abs(v)));

      if (t != EnergyTerm::kConnLogdet && t != EnergyTerm::kHierConn) {
        EXPECT_GE(v, 0.0);
      }
    }
  }
}

TEST_F(EnergyTest, GradcheckSuitePasses) {
  const GradcheckReport report = run_gradcheck_suite(model(), 8, 8, 17);
  EXPECT_TRUE(report.passed()) << report.to_json().dump(2);
  EXPECT_LT(report.max_rel_err(), 1e-5);
}

TEST_F(EnergyTest, ConfigJsonRoundTrip) {
  config.m_target = { { 5, 4.5 } };
  config.connectivity = ConnectivityMode::kLambda2;
  const EnergyConfig back = EnergyConfig::from_json(config.to_json());
  EXPECT_EQ(back.to_json(), config.to_json());
  EXPECT_THROW(EnergyConfig::from_json({ { "lambda_vall", 1.0 } }),
               std::invalid_argument);
  EXPECT_THROW(EnergyConfig::from_json({ { "lambda_val", -1.0 } }),
               std::invalid_argument);
  EXPECT_EQ(energy_term_from_name(energy_term_name(EnergyTerm::kSteric)),
            EnergyTerm::kSteric);
}

}  // namespace
}  // namespace hierflow
