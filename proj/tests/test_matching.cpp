#include "dpaudit/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dpaudit/dataset.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {
namespace {

// Factorial brute-force oracle for the linear sum assignment problem.
long long brute_force_min_cost(const std::vector<std::vector<int>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long long best = std::numeric_limits<long long>::max();
  do {
    long long total = 0;
    for (int i = 0; i < n; ++i) total += cost[i][perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(MinCostMatching, EqualsBruteForceOnRandomMatrices) {
  Rng rng(314);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(7));
    std::vector<std::vector<int>> cost(n, std::vector<int>(n));
    for (auto& row : cost) {
      for (int& c : row) c = static_cast<int>(rng.uniform_int(30));
    }
    const MatchingResult result = min_cost_matching(cost);
    EXPECT_EQ(result.total_cost, brute_force_min_cost(cost)) << "n=" << n;

    // The assignment must be a permutation whose costs add up.
    std::vector<bool> used(n, false);
    long long total = 0;
    ASSERT_EQ(static_cast<int>(result.assignment.size()), n);
    for (int i = 0; i < n; ++i) {
      const int j = result.assignment[i];
      ASSERT_GE(j, 0);
      ASSERT_LT(j, n);
      EXPECT_FALSE(used[j]);
      used[j] = true;
      EXPECT_EQ(result.per_pair_costs[i], cost[i][j]);
      total += cost[i][j];
    }
    EXPECT_EQ(total, result.total_cost);
  }
}

TEST(MinCostMatching, HandCheckedInstance) {
  // Classic 3x3 with optimum 5 = 1 + 3 + 1 (perm 0->1, 1->0, 2->2).
  const std::vector<std::vector<int>> cost = {{4, 1, 3}, {3, 9, 7}, {9, 4, 1}};
  EXPECT_EQ(min_cost_matching(cost).total_cost, 5);
}

TEST(MinCostMatching, RejectsNonSquareInput) {
  EXPECT_THROW(min_cost_matching({{1, 2}, {3}}), std::invalid_argument);
}

TEST(ManhattanCostMatrix, CountsDifferingAttributesOnly) {
  BinaryDataset rec, orig;
  rec.rows = {{1, 0, 1}, {0, 0, 0}};
  rec.labels = {0, 1};
  orig.rows = {{1, 1, 1}, {1, 0, 1}};
  orig.labels = {1, 0};  // labels must not enter the distance
  const auto cost = manhattan_cost_matrix(rec, orig);
  EXPECT_EQ(cost[0][0], 1);
  EXPECT_EQ(cost[0][1], 0);
  EXPECT_EQ(cost[1][0], 3);
  EXPECT_EQ(cost[1][1], 2);
}

TEST(ReconstructionError, SelfDistanceIsZero) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const BinaryDataset d = generate_synthetic(8, 25, 0.5, {3}, seed);
    EXPECT_DOUBLE_EQ(reconstruction_error(d, d), 0.0);
  }
}

TEST(ReconstructionError, PermutationInvariant) {
  const BinaryDataset d = generate_synthetic(6, 12, 0.5, {2}, 44);
  BinaryDataset shuffled = d;
  std::reverse(shuffled.rows.begin(), shuffled.rows.end());
  std::reverse(shuffled.labels.begin(), shuffled.labels.end());
  EXPECT_DOUBLE_EQ(reconstruction_error(shuffled, d), 0.0);
}

TEST(ReconstructionError, NormalizesByCellCount) {
  BinaryDataset rec, orig;
  rec.rows = {{0, 0, 0, 0}};
  rec.labels = {0};
  orig.rows = {{1, 1, 0, 0}};
  orig.labels = {0};
  EXPECT_DOUBLE_EQ(reconstruction_error(rec, orig), 0.5);
}

}  // namespace
}  // namespace dpaudit
