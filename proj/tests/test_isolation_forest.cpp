#include "dpaudit/isolation_forest.hpp"

#include <algorithm>
#include <vector>

#include <gtest/gtest.h>

#include "dpaudit/dataset.hpp"

namespace dpaudit {
namespace {

// A dataset of identical rows admits no split, so every tree isolates nothing
// and each score is exactly 2^{-c(psi)/c(psi)} = 0.5; the default threshold
// (strictly greater) must then flag no outliers.
TEST(IsolationForest, IdenticalRowsScoreExactlyHalf) {
  BinaryDataset d;
  for (int i = 0; i < 64; ++i) {
    d.rows.push_back({1, 0, 1, 1, 0});
    d.labels.push_back(0);
  }
  IsolationOptions options;
  options.seed = 3;
  const std::vector<double> scores = isolation_scores(d, options);
  for (double s : scores) EXPECT_DOUBLE_EQ(s, 0.5);
  const InlierSplit split = split_inliers_outliers(scores);
  EXPECT_EQ(split.inliers.size(), 64u);
  EXPECT_TRUE(split.outliers.empty());
}

// A single row far from a tight cluster isolates in very few splits, so its
// score must exceed every cluster row's score.
TEST(IsolationForest, LoneDeviantRowScoresHighest) {
  BinaryDataset d;
  for (int i = 0; i < 50; ++i) {
    // Cluster varies only in the last attribute.
    d.rows.push_back({0, 0, 0, 0, 0, 0, 0, static_cast<std::uint8_t>(i % 2)});
    d.labels.push_back(0);
  }
  d.rows.push_back({1, 1, 1, 1, 1, 1, 1, 0});
  d.labels.push_back(0);
  IsolationOptions options;
  options.seed = 11;
  const std::vector<double> scores = isolation_scores(d, options);
  const double deviant = scores.back();
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
    EXPECT_GT(deviant, scores[i]);
  }
}

TEST(IsolationForest, ScoresStayInUnitInterval) {
  const BinaryDataset d = generate_synthetic(10, 300, 0.5, {3}, 17);
  IsolationOptions options;
  options.seed = 29;
  const std::vector<double> scores = isolation_scores(d, options);
  ASSERT_EQ(scores.size(), 300u);
  for (double s : scores) {
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(IsolationForest, DeterministicInSeed) {
  const BinaryDataset d = generate_synthetic(8, 100, 0.5, {}, 23);
  IsolationOptions options;
  options.seed = 5;
  const auto a = isolation_scores(d, options);
  const auto b = isolation_scores(d, options);
  EXPECT_EQ(a, b);
  options.seed = 6;
  EXPECT_NE(isolation_scores(d, options), a);
}

TEST(SplitInliersOutliers, StrictThresholdPartition) {
  const std::vector<double> scores = {0.4, 0.5, 0.6, 0.2, 0.9};
  const InlierSplit split = split_inliers_outliers(scores, 0.5);
  EXPECT_EQ(split.inliers, (std::vector<int>{0, 1, 3}));  // 0.5 stays inlier
  EXPECT_EQ(split.outliers, (std::vector<int>{2, 4}));
}

}  // namespace
}  // namespace dpaudit
