#include "dpaudit/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "dpaudit/dataset.hpp"
#include "dpaudit/forest.hpp"

namespace dpaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct TinyInstance {
  BinaryDataset data;
  ForestView view;
  ReconstructionProblem problem;
};

TinyInstance make_full_instance(int m, int n, int trees, int depth,
                                double epsilon, std::uint64_t seed,
                                const std::vector<int>& layout = {}) {
  TinyInstance t;
  t.data = generate_synthetic(m, n, 0.5, layout, seed);
  const Forest forest = train_dp_forest(t.data, trees, depth, epsilon, seed + 1);
  t.view = attacker_view(forest, t.data.groups);
  ProblemOptions options;
  options.n_train = n;
  t.problem = build_problem(t.view, ThreatModel::full, options);
  return t;
}

using Assignment = std::vector<std::pair<int, int>>;  // (pattern, label)

// Reference enumerator: scores every assignment through score_solution (the
// routing path), independent of the solver's incremental bookkeeping.
struct BruteForce {
  const ReconstructionProblem& problem;
  std::vector<std::vector<std::uint8_t>> patterns;
  double best_objective = kNegInf;
  bool best_is_hard = false;
  long long scored = 0;
  std::vector<BinaryDataset> argmax;  // canonical datasets within 1e-9

  explicit BruteForce(const ReconstructionProblem& p)
      : problem(p),
        patterns(enumerate_valid_patterns(p.num_features, p.view.groups)) {}

  CandidateSolution score(const Assignment& assignment) {
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<int> labels;
    for (auto [p, label] : assignment) {
      rows.push_back(patterns[p]);
      labels.push_back(label);
    }
    return score_solution(problem, std::move(rows), std::move(labels));
  }

  void consider(const Assignment& assignment) {
    ++scored;
    const CandidateSolution sol = score(assignment);
    const bool hard = sol.hard_feasible;
    if (hard && !best_is_hard) {
      best_is_hard = true;
      best_objective = kNegInf;
      argmax.clear();
    }
    if (hard != best_is_hard) return;
    if (sol.objective > best_objective + 1e-9) {
      best_objective = sol.objective;
      argmax.clear();
    }
    if (sol.objective >= best_objective - 1e-9) {
      argmax.push_back(extract_reconstruction(sol, problem.view.groups));
    }
  }

  void multisets(std::size_t item, int remaining, Assignment& current) {
    if (remaining == 0) {
      consider(current);
      return;
    }
    const std::size_t items = patterns.size() * problem.num_classes;
    if (item == items) return;
    for (int c = remaining; c >= 0; --c) {
      for (int i = 0; i < c; ++i) {
        current.emplace_back(static_cast<int>(item) / problem.num_classes,
                             static_cast<int>(item) % problem.num_classes);
      }
      multisets(item + 1, remaining - c, current);
      for (int i = 0; i < c; ++i) current.pop_back();
    }
  }

  void sequences(const std::vector<Assignment>& candidates, std::size_t row,
                 Assignment& current) {
    if (row == candidates.size()) {
      consider(current);
      return;
    }
    for (auto item : candidates[row]) {
      current.push_back(item);
      sequences(candidates, row + 1, current);
      current.pop_back();
    }
  }

  bool contains(const BinaryDataset& d) const {
    return std::any_of(argmax.begin(), argmax.end(), [&](const BinaryDataset& a) {
      return a.rows == d.rows && a.labels == d.labels;
    });
  }
};

TEST(ExactSolver, FullModeAgreesWithBruteForce) {
  const TinyInstance t = make_full_instance(3, 3, 2, 2, 4.0, 17);
  const ExactResult result = solve_exact(t.problem);

  BruteForce oracle(t.problem);
  Assignment scratch;
  oracle.multisets(0, 3, scratch);

  // 8 patterns x 2 labels taken 3 at a time with repetition.
  EXPECT_EQ(oracle.scored, 816);
  EXPECT_EQ(result.evaluated, oracle.scored);
  EXPECT_EQ(result.status, ExactStatus::optimal);
  EXPECT_TRUE(oracle.best_is_hard);
  EXPECT_NEAR(result.best.objective, oracle.best_objective, 1e-9);
  EXPECT_TRUE(oracle.contains(
      extract_reconstruction(result.best, t.problem.view.groups)));
  EXPECT_TRUE(check_solution(t.problem, result.best).empty());
}

TEST(ExactSolver, HandlesOneHotGroupsInTheUniverse) {
  const TinyInstance t = make_full_instance(5, 3, 2, 2, 4.0, 23, {3});
  const ExactResult result = solve_exact(t.problem);

  BruteForce oracle(t.problem);
  Assignment scratch;
  oracle.multisets(0, 3, scratch);

  // 3 * 2^2 = 12 patterns, 24 items, C(26,3) multisets.
  EXPECT_EQ(oracle.scored, 2600);
  EXPECT_NEAR(result.best.objective, oracle.best_objective, 1e-9);
  EXPECT_TRUE(check_solution(t.problem, result.best).empty());
  for (const auto& row : result.best.rows) {
    EXPECT_EQ(row[0] + row[1] + row[2], 1);
  }
}

TEST(ExactSolver, ResultIsCanonicalAndDeterministic) {
  const TinyInstance t = make_full_instance(3, 3, 2, 2, 4.0, 29);
  const ExactResult a = solve_exact(t.problem);
  const ExactResult b = solve_exact(t.problem);
  EXPECT_EQ(a.best.rows, b.best.rows);
  EXPECT_EQ(a.best.labels, b.best.labels);

  // Multiset enumeration emits items in nondecreasing order, so the rows
  // come back already in canonical order.
  std::vector<std::pair<std::vector<std::uint8_t>, int>> pairs;
  for (std::size_t k = 0; k < a.best.rows.size(); ++k) {
    pairs.emplace_back(a.best.rows[k], a.best.labels[k]);
  }
  EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end()));
}

TEST(ExactSolver, NoNoiseRecoversTheExactMultiset) {
  const TinyInstance t = make_full_instance(3, 4, 2, 2, kInf, 31);
  const ExactResult result = solve_exact(t.problem);
  EXPECT_EQ(result.status, ExactStatus::optimal);
  EXPECT_TRUE(result.best.hard_feasible);
  EXPECT_DOUBLE_EQ(result.best.objective, 0.0);
  for (long long d : result.best.deltas) EXPECT_EQ(d, 0);

  // gamma = 0 leaves no slack: the derived counts are the true counts, and
  // with enough distinct cells the true multiset is pinned down exactly.
  const BinaryDataset truth = extract_reconstruction(
      score_solution(t.problem, t.data.rows, t.data.labels),
      t.problem.view.groups);
  const BinaryDataset found =
      extract_reconstruction(result.best, t.problem.view.groups);
  EXPECT_EQ(found.rows.size(), truth.rows.size());
}

TEST(ExactSolver, UnknownNCollapsesUnderTheNoNoiseSentinel) {
  const BinaryDataset data = generate_synthetic(3, 4, 0.5, {}, 37);
  const Forest forest = train_dp_forest(data, 2, 2, kInf, 38);
  const ForestView view = attacker_view(forest, data.groups);
  const ReconstructionProblem problem =
      build_problem(view, ThreatModel::unknown_n, {});
  ASSERT_EQ(problem.n_min(), 4);
  ASSERT_EQ(problem.n_max(), 4);

  const ExactResult result = solve_exact(problem);
  EXPECT_EQ(result.status, ExactStatus::optimal);
  EXPECT_EQ(result.best.rows.size(), 4u);
  EXPECT_DOUBLE_EQ(result.best.objective, 0.0);
  EXPECT_TRUE(check_solution(problem, result.best).empty());
}

TEST(ExactSolver, ReportsInfeasibleWhenNoAssignmentFits) {
  const BinaryDataset data = generate_synthetic(2, 4, 0.5, {}, 41);
  const Forest forest = train_dp_forest(data, 2, 2, kInf, 42);
  ForestView view = attacker_view(forest, data.groups);
  // gamma is 0 under the sentinel; a bumped count makes one tree's total 5
  // while every size-4 assignment derives totals of 4.
  for (auto& leaf : view.forest.trees[0].leaves) {
    auto& counts = view.forest.trees[0].nodes[leaf.node].noisy_counts;
    counts[0] += 1;
    break;
  }
  ProblemOptions options;
  options.n_train = 4;
  const ReconstructionProblem problem =
      build_problem(view, ThreatModel::full, options);
  const ExactResult result = solve_exact(problem);
  EXPECT_EQ(result.status, ExactStatus::infeasible_hard);
  EXPECT_FALSE(result.best.hard_feasible);
  EXPECT_EQ(result.best.objective, kNegInf);
  EXPECT_TRUE(check_solution(problem, result.best).empty());
}

TEST(ExactSolver, ThrowsAboveTheCeiling) {
  const TinyInstance t = make_full_instance(3, 3, 2, 2, 4.0, 43);
  ExactLimits limits;
  limits.ceiling = 100;  // 16^3 = 4096 > 100
  EXPECT_THROW(solve_exact(t.problem, limits), std::runtime_error);

  // The bound must be computed in logs: a width no machine integer holds
  // still throws cleanly instead of overflowing.
  const TinyInstance huge = make_full_instance(6, 200, 2, 2, 4.0, 47);
  EXPECT_THROW(solve_exact(huge.problem), std::runtime_error);
}

TEST(ExactSolver, PartialModeAgreesWithSequenceBruteForce) {
  const BinaryDataset data = generate_synthetic(3, 3, 0.5, {}, 53);
  const Forest forest = train_dp_forest(data, 2, 2, 4.0, 54);
  const ForestView view = attacker_view(forest, data.groups);

  ProblemOptions options;
  options.n_train = 3;
  options.known_columns.columns = {0};
  for (const auto& row : data.rows) {
    options.known_columns.values.push_back({row[0]});
  }
  const ReconstructionProblem problem =
      build_problem(view, ThreatModel::partial, options);
  const ExactResult result = solve_exact(problem);

  BruteForce oracle(problem);
  std::vector<Assignment> candidates(3);
  for (int k = 0; k < 3; ++k) {
    for (std::size_t p = 0; p < oracle.patterns.size(); ++p) {
      if (oracle.patterns[p][0] != data.rows[k][0]) continue;
      for (int c = 0; c < problem.num_classes; ++c) {
        candidates[k].emplace_back(static_cast<int>(p), c);
      }
    }
  }
  Assignment scratch;
  oracle.sequences(candidates, 0, scratch);

  EXPECT_EQ(oracle.scored, 512);  // (4 patterns x 2 labels)^3
  EXPECT_EQ(result.evaluated, oracle.scored);
  EXPECT_NEAR(result.best.objective, oracle.best_objective, 1e-9);
  EXPECT_TRUE(check_solution(problem, result.best).empty());
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(result.best.rows[k][0], data.rows[k][0]);
  }
}

TEST(ExactSolver, InformedModeFreezesKnownRowsAndOptimizesTheRest) {
  const BinaryDataset data = generate_synthetic(3, 3, 0.5, {}, 59);
  const Forest forest = train_dp_forest(data, 2, 2, 4.0, 60);
  const ForestView view = attacker_view(forest, data.groups);

  ProblemOptions options;
  options.n_train = 3;
  options.known_rows = data;
  options.known_rows.rows.resize(2);
  options.known_rows.labels.resize(2);
  const ReconstructionProblem problem =
      build_problem(view, ThreatModel::informed, options);
  const ExactResult result = solve_exact(problem);

  EXPECT_EQ(result.best.rows[0], data.rows[0]);
  EXPECT_EQ(result.best.rows[1], data.rows[1]);
  EXPECT_EQ(result.best.labels[0], data.labels[0]);
  EXPECT_EQ(result.best.labels[1], data.labels[1]);
  EXPECT_TRUE(check_solution(problem, result.best).empty());

  // One free row: scan all 16 completions by hand.
  BruteForce oracle(problem);
  double best = kNegInf;
  for (std::size_t p = 0; p < oracle.patterns.size(); ++p) {
    for (int c = 0; c < problem.num_classes; ++c) {
      std::vector<std::vector<std::uint8_t>> rows = {data.rows[0], data.rows[1],
                                                     oracle.patterns[p]};
      std::vector<int> labels = {data.labels[0], data.labels[1], c};
      const CandidateSolution sol =
          score_solution(problem, std::move(rows), std::move(labels));
      if (sol.hard_feasible) best = std::max(best, sol.objective);
    }
  }
  EXPECT_NEAR(result.best.objective, best, 1e-9);
  EXPECT_EQ(result.evaluated, 16);
}

}  // namespace
}  // namespace dpaudit
