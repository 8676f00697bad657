//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "hierflow/error.h"
#include "hierflow/hierarchy.h"
#include "hierflow/rings.h"
#include "molgen.h"
#include "oracles.h"

namespace hierflow {
namespace {

using testing::make_molecule;

class HierarchyTest: public ::testing::Test {
protected:
  ElementTable table = ElementTable::defaults();
  BondOrders orders = BondOrders::with_aromatic();
  HierarchyConfig config;

  HierarchyPlan build(const Molecule &mol) {
    const TokenVocabulary vocab = build_vocabulary({ mol }, table, config);
    return build_hierarchy(mol, table, config, vocab);
  }

  Molecule cyclohexane() {
    return make_molecule(table, { "C", "C", "C", "C", "C", "C" },
                         { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 },
                           { 3, 4, 1 }, { 4, 5, 1 }, { 0, 5, 1 } });
  }
};

TEST_F(HierarchyTest, RecapLeavesCarbonChainWhole) {
  const Molecule mol = make_molecule(
      table, { "C", "C", "C", "C" }, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 } });
  const auto motifs =
      fragment_acyclic(mol, {}, FragmentationMode::kRecapLike, table);
  ASSERT_EQ(motifs.size(), 1u);
  EXPECT_EQ(motifs[0], (std::vector<int> { 0, 1, 2, 3 }));
}

TEST_F(HierarchyTest, RecapCutsCarbonNitrogen) {
  const Molecule mol = make_molecule(
      table, { "C", "C", "N", "C" }, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 } });
  const auto motifs =
      fragment_acyclic(mol, {}, FragmentationMode::kRecapLike, table);
  ASSERT_EQ(motifs.size(), 2u);
  EXPECT_EQ(motifs[0], (std::vector<int> { 0, 1 }));
  EXPECT_EQ(motifs[1], (std::vector<int> { 2, 3 }));
}

TEST_F(HierarchyTest, BricsAlsoCutsNextToHeteroatom) {
  // C0-C1-C2-O3-C4: C1-C2 is adjacent to the heteroatom O3.
  const Molecule mol =
      make_molecule(table, { "C", "C", "C", "O", "C" },
                    { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 }, { 3, 4, 1 } });
  const auto recap =
      fragment_acyclic(mol, {}, FragmentationMode::kRecapLike, table);
  const auto brics =
      fragment_acyclic(mol, {}, FragmentationMode::kBricsLike, table);
  EXPECT_EQ(recap, (std::vector<std::vector<int>> { { 0, 1, 2 }, { 3, 4 } }));
  EXPECT_EQ(brics.size(), 2u);
  EXPECT_EQ(brics[0], (std::vector<int> { 0, 1 }));
  EXPECT_EQ(brics[1], (std::vector<int> { 3, 4 }));
}

TEST_F(HierarchyTest, DoubleBondsAreNeverCut) {
  const Molecule mol = make_molecule(
      table, { "C", "C", "N", "C" }, { { 0, 1, 1 }, { 1, 2, 2 }, { 2, 3, 1 } });
  EXPECT_EQ(fragment_acyclic(mol, {}, FragmentationMode::kRecapLike, table)
                .size(),
            1u);
}

TEST_F(HierarchyTest, RingAtomsAreExcluded) {
  const Molecule ring = cyclohexane();
  EXPECT_TRUE(fragment_acyclic(ring, { 0, 1, 2, 3, 4, 5 },
                               FragmentationMode::kRecapLike, table)
                  .empty());
}

TEST_F(HierarchyTest, MotifTreeTwoMotifs) {
  MotifDecomposition d;
  d.motifs = { { 0, 1, 2 }, { 1, 2, 3, 4, 5 } };
  d.signatures = { "a", "b" };
  d.edges = intersection_edges(d.motifs);
  ASSERT_EQ(d.edges.size(), 1u);
  EXPECT_EQ(d.edges[0].weight, 2);
  const MotifTree tree = build_motif_tree(d);
  EXPECT_EQ(tree.parent, (std::vector<int> { 1, -1 }));
  EXPECT_EQ(tree.order, (std::vector<int> { 1, 0 }));
  EXPECT_EQ(tree.depth, (std::vector<int> { 2, 1 }));
}

TEST_F(HierarchyTest, MotifTreeTieBreak) {
  MotifDecomposition d;
  d.motifs = { { 0, 1, 2, 3 }, { 2, 3, 4 }, { 3, 4, 5 } };
  d.signatures = { "a", "b", "c" };
  d.edges = { { 0, 1, 2 }, { 0, 2, 1 }, { 1, 2, 2 } };
  d.edges[2].weight = 1;
  // Weights (A,B)=2, (A,C)=1, (B,C)=1: the tie resolves to (A,C).
  const MotifTree tree = build_motif_tree(d);
  EXPECT_EQ(tree.parent, (std::vector<int> { -1, 0, 0 }));
  EXPECT_EQ(tree.order, (std::vector<int> { 0, 1, 2 }));
}

TEST_F(HierarchyTest, MotifTreeSingleMotifAndForest) {
  MotifDecomposition one;
  one.motifs = { { 0, 1 } };
  one.signatures = { "a" };
  EXPECT_EQ(build_motif_tree(one).parent, (std::vector<int> { -1 }));

  MotifDecomposition forest;
  forest.motifs = { { 0, 1 }, { 5, 6, 7 } };
  forest.signatures = { "a", "b" };
  const MotifTree tree = build_motif_tree(forest);
  EXPECT_EQ(tree.parent, (std::vector<int> { -1, -1 }));
  EXPECT_EQ(tree.depth, (std::vector<int> { 1, 1 }));
}

TEST_F(HierarchyTest, SingleRingPlan) {
  const HierarchyPlan plan = build(cyclohexane());
  ASSERT_EQ(plan.num_tokens(), 8);
  EXPECT_EQ(plan.kinds[0], TokenKind::kRoot);
  EXPECT_EQ(plan.kinds[1], TokenKind::kMotif);
  const std::vector<int> parents = plan.parents();
  EXPECT_EQ(parents[1], 0);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(plan.leaf_anchor[i], 2 + i);
    EXPECT_EQ(plan.kinds[2 + i], TokenKind::kLeaf);
    EXPECT_EQ(parents[2 + i], 1);
  }
  EXPECT_EQ(plan.motif_atoms[1], (std::vector<int> { 0, 1, 2, 3, 4, 5 }));
  EXPECT_FALSE(plan_violation(plan).has_value());
}

TEST_F(HierarchyTest, SingleAtomPlan) {
  const HierarchyPlan plan = build(make_molecule(table, { "O" }, {}));
  ASSERT_EQ(plan.num_tokens(), 2);
  EXPECT_EQ(plan.kinds[1], TokenKind::kLeaf);
  EXPECT_EQ(plan.parents()[1], 0);
  EXPECT_EQ(plan.type_ids()[0], TokenVocabulary::kRootType);
  EXPECT_EQ(plan.type_ids()[1], 1 + table.index_of("O"));
}

TEST_F(HierarchyTest, DeterministicAndCausalOnRandomMolecules) {
  std::mt19937_64 rng(41);
  testing::MolGenOptions opts;
  opts.max_atoms = 16;
  opts.relax_iterations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Molecule mol = testing::random_molecule(rng, table, orders, opts);
    const HierarchyPlan a = build(mol);
    const HierarchyPlan b = build(mol);
    EXPECT_EQ(a, b);
    EXPECT_EQ(plan_to_json(a).dump(), plan_to_json(b).dump());
    EXPECT_FALSE(plan_violation(a).has_value());

    // Every ring atom sits in exactly one fused-ring motif.
    for (const auto &system: fuse_rings(perceive_rings(mol))) {
      for (int atom: system) {
        int hosts = 0;
        for (int t = 1; t <= a.num_motifs(); ++t) {
          const auto &m = a.motif_atoms[t];
          hosts += std::binary_search(m.begin(), m.end(), atom) ? 1 : 0;
        }
        EXPECT_EQ(hosts, 1);
      }
    }
  }
}

TEST_F(HierarchyTest, BudgetMergesAdjacentMotifs) {
  const Molecule mol = make_molecule(
      table, { "C", "C", "N", "C" }, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 } });
  ASSERT_EQ(build(mol).num_motifs(), 2);
  config.max_motifs = 1;
  const HierarchyPlan merged = build(mol);
  ASSERT_EQ(merged.num_motifs(), 1);
  EXPECT_EQ(merged.motif_atoms[1], (std::vector<int> { 0, 1, 2, 3 }));
}

TEST_F(HierarchyTest, BudgetErrors) {
  // Ether oxygens separate the carbon fragments, so nothing can merge.
  const Molecule mol = make_molecule(
      table, { "C", "C", "O", "C", "C", "O", "C", "C" },
      { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 }, { 3, 4, 1 }, { 4, 5, 1 },
        { 5, 6, 1 }, { 6, 7, 1 } });
  EXPECT_EQ(build(mol).num_motifs(), 3);
  config.max_motifs = 1;
  EXPECT_THROW(build(mol), BudgetError);
  config.max_motifs = 16;
  config.max_atoms = 4;
  EXPECT_THROW(build(mol), BudgetError);
}

TEST(CausalRenormalize, Examples) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(4, 4);
  rho.row(1) << 1, 0, 0, 0;
  rho.row(2) << 0.2, 0.3, 0.5, 0;
  rho.row(3) << 0.1, 0.2, 0.7, 0;
  const Eigen::MatrixXd out = causal_renormalize(rho);
  EXPECT_NEAR(out(2, 0), 0.4, 1e-15);
  EXPECT_NEAR(out(2, 1), 0.6, 1e-15);
  EXPECT_EQ(out(2, 2), 0.0);
  EXPECT_TRUE(causal_renormalize(out).isApprox(out, 1e-15));
  EXPECT_TRUE(out.row(3).isApprox(rho.row(3), 1e-15));

  Eigen::MatrixXd invalid = Eigen::MatrixXd::Zero(4, 4);
  invalid(3, 3) = 1.0;
  EXPECT_TRUE(causal_renormalize(invalid).row(3).isApprox(
      Eigen::RowVector4d(1.0 / 3, 1.0 / 3, 1.0 / 3, 0), 1e-15));

  Eigen::MatrixXd root = Eigen::MatrixXd::Zero(3, 3);
  root(0, 1) = 1.0;
  EXPECT_THROW(causal_renormalize(root), std::invalid_argument);
}

TEST(CausalRenormalize, MaskedTokensReceiveNoMass) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Constant(4, 4, 1.0);
  rho.row(0).setZero();
  const std::vector<bool> mask { true, false, true, true };
  const Eigen::MatrixXd out = causal_renormalize(rho, mask);
  EXPECT_EQ(out(3, 1), 0.0);
  EXPECT_NEAR(out(3, 0), 0.5, 1e-15);
  EXPECT_NEAR(out(1, 0), 1.0, 1e-15);
  EXPECT_FALSE(causal_violation(out, mask).has_value());
  EXPECT_TRUE(causal_violation(rho, mask).has_value());
}

TEST(SoftAncestorMask, HardChain) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(4, 4);
  rho(1, 0) = 1;
  rho(2, 1) = 1;
  rho(3, 0) = 1;
  const Eigen::MatrixXd pi = soft_ancestor_mask(rho, { 2, 3 });
  EXPECT_EQ(pi.row(0), Eigen::RowVector4d(1, 1, 1, 0));
  EXPECT_EQ(pi.row(1), Eigen::RowVector4d(1, 0, 0, 1));
}

TEST(SoftAncestorMask, SplitParent) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(4, 4);
  rho(1, 0) = 1;
  rho(2, 0) = 1;
  rho(3, 1) = 0.6;
  rho(3, 2) = 0.4;
  const Eigen::MatrixXd pi = soft_ancestor_mask(rho, { 3 });
  EXPECT_NEAR(pi(0, 1), 0.6, 1e-15);
  EXPECT_NEAR(pi(0, 2), 0.4, 1e-15);
  EXPECT_NEAR(pi(0, 0), 1.0, 1e-15);
  EXPECT_EQ(pi(0, 3), 1.0);

  const Eigen::MatrixXd early = soft_ancestor_mask(rho, { 2 });
  EXPECT_EQ(early(0, 3), 0.0);
}

TEST(SoftAncestorMask, RejectsNonCausal) {
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(3, 3);
  rho(1, 0) = 0.5;
  rho(1, 2) = 0.5;
  rho(2, 0) = 1;
  EXPECT_THROW(soft_ancestor_mask(rho, { 2 }), std::invalid_argument);
}

TEST(SoftAncestorMask, MatchesEnumeration) {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> tokens(2, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int a = tokens(rng);
    std::uniform_int_distribution<int> leaves(1, a - 1);
    const auto plan = testing::random_causal_plan(rng, a, leaves(rng));
    const Eigen::MatrixXd dp =
        soft_ancestor_mask(plan.parent_probs, plan.leaf_anchor);
    const Eigen::MatrixXd brute =
        testing::enumerate_ancestors(plan.parent_probs, plan.leaf_anchor);
    EXPECT_LT((dp - brute).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SoftAncestorMask, HardPlanRowSumsAreDepthPlusOne) {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> tokens(2, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const int a = tokens(rng);
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(a, a);
    for (int t = 1; t < a; ++t)
      rho(t, std::uniform_int_distribution<int>(0, t - 1)(rng)) = 1.0;
    std::vector<int> anchors;
    for (int t = 1; t < a; ++t)
      anchors.push_back(t);
    const Eigen::MatrixXd pi = soft_ancestor_mask(rho, anchors);
    for (int i = 0; i < static_cast<int>(anchors.size()); ++i) {
      int depth = 0;
      for (int t = anchors[i]; t != 0; ++depth) {
        int parent = 0;
        rho.row(t).maxCoeff(&parent);
        t = parent;
      }
      EXPECT_DOUBLE_EQ(pi.row(i).sum(), depth + 1.0);
      EXPECT_TRUE(((pi.row(i).array() == 0) || (pi.row(i).array() == 1)).all());
    }
  }
}

TEST(SoftAncestorMask, MonotoneInParentMass) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> bump(0.05, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto plan = testing::random_causal_plan(rng, 7, 3, 0.0);
    const Eigen::MatrixXd base =
        soft_ancestor_mask(plan.parent_probs, plan.leaf_anchor);
    const int alpha = std::uniform_int_distribution<int>(2, 6)(rng);
    const int beta = std::uniform_int_distribution<int>(0, alpha - 1)(rng);
    Eigen::MatrixXd rho = plan.parent_probs;
    rho(alpha, beta) += bump(rng);
    rho = causal_renormalize(rho);
    const Eigen::MatrixXd after = soft_ancestor_mask(rho, plan.leaf_anchor);
    for (int i = 0; i < base.rows(); ++i) {
      if (base(i, alpha) > 0) {
        EXPECT_GE(after(i, beta), base(i, beta) - 1e-12);
      }
    }
  }
}

TEST_F(HierarchyTest, PadAndUnpad) {
  const Molecule mol = make_molecule(
      table, { "C", "C", "N", "C" }, { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 } });
  const HierarchyPlan plan = build(mol);
  ASSERT_EQ(plan.num_motifs(), 2);

  const HierarchyPlan padded = pad_plan(plan, 4, 6);
  EXPECT_EQ(padded.num_tokens(), 1 + 4 + 6);
  EXPECT_EQ(std::count(padded.mask.begin(), padded.mask.end(), false), 4);
  EXPECT_FALSE(padded.mask[3]);
  EXPECT_FALSE(padded.mask[4]);
  EXPECT_EQ(padded.leaf_anchor, (std::vector<int> { 5, 6, 7, 8 }));
  EXPECT_FALSE(plan_violation(padded).has_value());
  EXPECT_EQ(unpad_plan(padded), plan);
  EXPECT_EQ(pad_plan(plan, 2, 4), plan);

  const Eigen::MatrixXd pi = soft_ancestor_mask(padded);
  EXPECT_EQ(pi.col(3).norm(), 0.0);
  EXPECT_THROW(pad_plan(plan, 1, 6), BudgetError);
}

TEST_F(HierarchyTest, JsonRoundTrip) {
  const HierarchyPlan plan = pad_plan(build(cyclohexane()), 3, 8);
  EXPECT_EQ(plan_from_json(plan_to_json(plan)), plan);

  HierarchyPlan soft = plan;
  soft.parent_probs.row(2).setZero();
  soft.parent_probs(2, 0) = 0.25;
  soft.parent_probs(2, 1) = 0.75;
  EXPECT_EQ(plan_from_json(plan_to_json(soft)), soft);
}

TEST_F(HierarchyTest, VocabularyLayout) {
  const TokenVocabulary vocab = build_vocabulary(
      { cyclohexane(), make_molecule(table, { "C", "C", "N", "C" },
                                     { { 0, 1, 1 }, { 1, 2, 1 }, { 2, 3, 1 } }) },
      table, config);
  EXPECT_EQ(vocab.num_elements(), table.size());
  EXPECT_EQ(vocab.unknown_type(), 1 + table.size());
  EXPECT_EQ(vocab.size(), 2 + table.size() + 3);
  EXPECT_EQ(vocab.kind_of(0), TokenKind::kRoot);
  EXPECT_EQ(vocab.kind_of(vocab.element_type(1)), TokenKind::kLeaf);
  EXPECT_EQ(vocab.kind_of(vocab.unknown_type()), TokenKind::kMotif);
  EXPECT_EQ(vocab.motif_type("no such motif"), vocab.unknown_type());
  EXPECT_EQ(TokenVocabulary::from_json(vocab.to_json()), vocab);
}

}  // namespace
}  // namespace hierflow
