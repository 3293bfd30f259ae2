#include "dpaudit/evaluation.hpp"

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "dpaudit/dataset.hpp"

namespace dpaudit {
namespace {

TEST(AlignUnknownN, SubsamplesWhenTooLarge) {
  const BinaryDataset rec = generate_synthetic(6, 20, 0.5, {2}, 1);
  const BinaryDataset aligned = align_unknown_n(rec, 12, 9);
  EXPECT_EQ(aligned.n(), 12);
  // Every aligned row is one of the reconstructed rows, no overdraw.
  std::map<std::vector<std::uint8_t>, int> budget;
  for (const auto& r : rec.rows) ++budget[r];
  for (const auto& r : aligned.rows) {
    auto it = budget.find(r);
    ASSERT_NE(it, budget.end());
    ASSERT_GE(--it->second, 0);
  }
}

TEST(AlignUnknownN, PadsWithDuplicatesWhenTooSmall) {
  const BinaryDataset rec = generate_synthetic(6, 5, 0.5, {}, 2);
  const BinaryDataset aligned = align_unknown_n(rec, 9, 9);
  EXPECT_EQ(aligned.n(), 9);
  std::map<std::vector<std::uint8_t>, int> seen;
  for (const auto& r : rec.rows) ++seen[r];
  for (const auto& r : aligned.rows) {
    EXPECT_TRUE(seen.count(r)) << "pad row must duplicate an existing row";
  }
}

TEST(AlignUnknownN, IdentityWhenSizesMatch) {
  const BinaryDataset rec = generate_synthetic(4, 7, 0.5, {}, 3);
  const BinaryDataset aligned = align_unknown_n(rec, 7, 1);
  EXPECT_EQ(aligned.rows, rec.rows);
  EXPECT_EQ(aligned.labels, rec.labels);
}

TEST(AlignUnknownN, DeterministicInSeed) {
  const BinaryDataset rec = generate_synthetic(5, 30, 0.5, {}, 4);
  const BinaryDataset a = align_unknown_n(rec, 11, 42);
  const BinaryDataset b = align_unknown_n(rec, 11, 42);
  EXPECT_EQ(a.rows, b.rows);
}

// One free bit, one original row {0}: a uniform guess errs half the time, so
// the mean error over many runs concentrates near 0.5 (4-sigma ~ 0.02).
TEST(RandomBaseline, FairCoinOnSingleFreeBit) {
  BinaryDataset orig;
  orig.rows = {{0}};
  orig.labels = {0};
  const double mean = random_baseline(orig, {}, 10000, 5);
  EXPECT_NEAR(mean, 0.5, 0.02);
}

// One group of two: the guess matches the data pattern half the time, with
// error 0 or 1 (both bits differ), so the mean again sits near 0.5.
TEST(RandomBaseline, UniformOverGroupSlots) {
  BinaryDataset orig;
  orig.rows = {{1, 0}};
  orig.labels = {0};
  const double mean = random_baseline(orig, {{0, 1}}, 10000, 6);
  EXPECT_NEAR(mean, 0.5, 0.02);
}

TEST(RandomBaseline, DeterministicInSeed) {
  const BinaryDataset orig = generate_synthetic(8, 15, 0.5, {3}, 7);
  EXPECT_DOUBLE_EQ(random_baseline(orig, orig.groups, 50, 9),
                   random_baseline(orig, orig.groups, 50, 9));
  EXPECT_NE(random_baseline(orig, orig.groups, 50, 9),
            random_baseline(orig, orig.groups, 50, 10));
}

TEST(MajorityBaseline, FreeCoordinateMajorityWithTiesToOne) {
  BinaryDataset known;
  known.rows = {{1, 0, 1}, {1, 1, 0}, {0, 0, 1}};
  known.labels = {0, 0, 0};
  // ones = {2, 1, 2}; n = 3: 2*2 >= 3 -> 1, 2*1 < 3 -> 0.
  EXPECT_EQ(majority_baseline(known), (std::vector<std::uint8_t>{1, 0, 1}));

  BinaryDataset tie;
  tie.rows = {{1}, {0}};
  tie.labels = {0, 0};
  EXPECT_EQ(majority_baseline(tie), (std::vector<std::uint8_t>{1}));
}

TEST(MajorityBaseline, GroupVotesArgmaxTieToLowestIndex) {
  BinaryDataset known;
  known.rows = {{1, 0, 0}, {0, 1, 0}, {1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
  known.labels = {0, 0, 0, 0, 0};
  known.groups = {{0, 1, 2}};
  // Votes {2, 2, 1}: tie between slots 0 and 1 resolves to 0.
  EXPECT_EQ(majority_baseline(known), (std::vector<std::uint8_t>{1, 0, 0}));
}

TEST(PerfectStats, CountsExactRowsAndWorstError) {
  MatchingResult matching;
  matching.assignment = {0, 1, 2, 3};
  matching.per_pair_costs = {0, 3, 0, 1};
  matching.total_cost = 4;
  const PerfectStats stats = perfect_reconstruction_stats(matching, 6);
  EXPECT_DOUBLE_EQ(stats.proportion_perfect, 0.5);
  EXPECT_DOUBLE_EQ(stats.worst_individual_error, 0.5);
}

// Reference values from standard normal tables (15 digits).
TEST(NormalCdf, MatchesReferenceValues) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.0), 0.841344746068543, 1e-12);
  EXPECT_NEAR(normal_cdf(-1.0), 0.158655253931457, 1e-12);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(normal_cdf(-2.575829303548901), 0.005, 1e-12);
  EXPECT_NEAR(normal_cdf(3.0), 0.998650101968370, 1e-12);
}

TEST(PrivacyLeak, DegenerateWhenPoolIsConstant) {
  BinaryDataset constant;
  for (int i = 0; i < 40; ++i) {
    constant.rows.push_back({1, 0, 1});
    constant.labels.push_back(0);
  }
  BinaryDataset rec;
  rec.rows = {{1, 0, 1}, {1, 0, 1}};
  rec.labels = {0, 0};
  BinaryDataset orig = rec;
  const LeakResult leak = privacy_leak_cdf(rec, orig, constant, 20, 3);
  EXPECT_TRUE(leak.degenerate);
  EXPECT_DOUBLE_EQ(leak.stddev, 0.0);
  // Actual error equals the constant sample error -> midpoint convention.
  EXPECT_DOUBLE_EQ(leak.cdf, 0.5);
}

TEST(PrivacyLeak, PerfectReconstructionScoresLowCdf) {
  const BinaryDataset pool = generate_synthetic(10, 400, 0.5, {3}, 21);
  const TrainHeldoutSplit split = sample_training_set(pool, 30, 4);
  // Reconstruction == the true training set: its error (0) should fall far
  // below errors of random held-out draws.
  const LeakResult leak =
      privacy_leak_cdf(split.train, split.train, split.heldout, 60, 8);
  EXPECT_FALSE(leak.degenerate);
  EXPECT_LT(leak.cdf, 0.01);
  EXPECT_GT(leak.mean, 0.0);
}

TEST(PrivacyLeak, ValidatesInputSizes) {
  const BinaryDataset d = generate_synthetic(5, 10, 0.5, {}, 1);
  BinaryDataset tiny_pool = generate_synthetic(5, 4, 0.5, {}, 2);
  EXPECT_THROW(privacy_leak_cdf(d, d, tiny_pool, 10, 1), std::invalid_argument);
  const BinaryDataset pool = generate_synthetic(5, 50, 0.5, {}, 3);
  EXPECT_THROW(privacy_leak_cdf(d, d, pool, 1, 1), std::invalid_argument);
}

}  // namespace
}  // namespace dpaudit
