#include "dpaudit/serialize.hpp"

#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "dpaudit/dataset.hpp"
#include "dpaudit/forest.hpp"

namespace dpaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(DatasetJson, RoundTripsExactly) {
  const BinaryDataset d = generate_synthetic(9, 40, 0.4, {3, 2}, 6);
  const BinaryDataset back = dataset_from_json(dataset_to_json(d));
  EXPECT_EQ(back.rows, d.rows);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.num_classes, d.num_classes);
  EXPECT_EQ(back.groups, d.groups);
}

TEST(ForestJson, PrivateViewRoundTripsCountsAndStructure) {
  const BinaryDataset data = generate_synthetic(6, 50, 0.5, {2}, 9);
  const Forest forest = train_dp_forest(data, 3, 3, 4.0, 17);
  const Forest back = forest_from_json(forest_to_json(forest, false));
  EXPECT_EQ(back.num_trees(), forest.num_trees());
  EXPECT_EQ(back.epsilon_total, forest.epsilon_total);
  EXPECT_EQ(back.num_classes, forest.num_classes);
  EXPECT_EQ(back.num_features, forest.num_features);
  EXPECT_EQ(back.n_train_true, forest.n_train_true);
  for (int t = 0; t < forest.num_trees(); ++t) {
    ASSERT_EQ(back.trees[t].nodes.size(), forest.trees[t].nodes.size());
    for (std::size_t k = 0; k < forest.trees[t].nodes.size(); ++k) {
      const TreeNode& a = forest.trees[t].nodes[k];
      const TreeNode& b = back.trees[t].nodes[k];
      EXPECT_EQ(b.kind, a.kind);
      EXPECT_EQ(b.attribute, a.attribute);
      EXPECT_EQ(b.left, a.left);
      EXPECT_EQ(b.right, a.right);
      EXPECT_EQ(b.true_counts, a.true_counts);
      EXPECT_EQ(b.noisy_counts, a.noisy_counts);
    }
    // Leaf predicates are rebuilt on load.
    EXPECT_EQ(back.trees[t].num_leaves(), forest.trees[t].num_leaves());
    for (int leaf = 0; leaf < forest.trees[t].num_leaves(); ++leaf) {
      EXPECT_EQ(back.trees[t].leaves[leaf].phi_plus,
                forest.trees[t].leaves[leaf].phi_plus);
      EXPECT_EQ(back.trees[t].leaves[leaf].phi_minus,
                forest.trees[t].leaves[leaf].phi_minus);
    }
  }
}

TEST(ForestJson, AttackerViewStripsSecrets) {
  const BinaryDataset data = generate_synthetic(6, 50, 0.5, {2}, 9);
  const Forest forest = train_dp_forest(data, 3, 3, 4.0, 17);
  const std::string text = forest_to_json(forest, true);
  EXPECT_EQ(text.find("true_counts"), std::string::npos);
  EXPECT_EQ(text.find("n_train"), std::string::npos);
  const Forest back = forest_from_json(text);
  EXPECT_EQ(back.n_train_true, -1);
  for (const DecisionTree& tree : back.trees) {
    for (const LeafPredicate& leaf : tree.leaves) {
      EXPECT_TRUE(tree.nodes[leaf.node].true_counts.empty());
      EXPECT_FALSE(tree.nodes[leaf.node].noisy_counts.empty());
    }
  }
}

TEST(ForestJson, InfinityEpsilonSurvivesTheTrip) {
  const BinaryDataset data = generate_synthetic(5, 30, 0.5, {}, 2);
  const Forest forest = train_dp_forest(data, 2, 2, kInf, 1);
  const Forest back = forest_from_json(forest_to_json(forest, true));
  EXPECT_EQ(back.epsilon_total, kInf);
}

TEST(TextFile, WriteThenReadIsIdentity) {
  const std::string path = testing::TempDir() + "roundtrip.txt";
  const std::string content = "line one\nline two\n";
  write_text_file(path, content);
  EXPECT_EQ(read_text_file(path), content);
}

}  // namespace
}  // namespace dpaudit
