#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dpaudit/exact_solver.hpp"

namespace dpaudit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Enumerator {
  const ReconstructionProblem& problem;
  // Candidate universe: pattern index x label, with per-tree leaf routes
  // resolved up front.
  std::vector<std::vector<std::uint8_t>> patterns;
  std::vector<std::vector<int>> pattern_leaf;  // [pattern][tree]
  std::vector<double> pattern_reg;             // informed: -sum L1 to known rows

  std::vector<long long> counts;
  std::vector<std::pair<int, int>> current;  // (pattern, label) per row
  double reg_sum = 0;

  long long evaluated = 0;
  bool have_best = false;
  double best_hard = kNegInf;
  double best_soft = kNegInf;
  bool best_is_hard = false;
  std::vector<std::pair<int, int>> best_assignment;

  explicit Enumerator(const ReconstructionProblem& p) : problem(p) {
    counts.assign(problem.num_cells, 0);
  }

  void route_patterns() {
    const Forest& forest = problem.view.forest;
    pattern_leaf.resize(patterns.size());
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      pattern_leaf[p].resize(forest.num_trees());
      for (int t = 0; t < forest.num_trees(); ++t) {
        pattern_leaf[p][t] = route_example(forest.trees[t], patterns[p]);
      }
    }
    if (problem.threat == ThreatModel::informed) {
      // -sum of L1 distances via per-column one-counts: a pattern bit of 1
      // disagrees with (K - ones[j]) known rows, a 0 with ones[j].
      const int num_known = problem.known_rows.n();
      std::vector<long long> ones(problem.num_features, 0);
      for (const auto& known : problem.known_rows.rows) {
        for (int j = 0; j < problem.num_features; ++j) ones[j] += known[j];
      }
      pattern_reg.assign(patterns.size(), 0);
      for (std::size_t p = 0; p < patterns.size(); ++p) {
        long long dist = 0;
        for (int j = 0; j < problem.num_features; ++j) {
          dist += patterns[p][j] ? num_known - ones[j] : ones[j];
        }
        pattern_reg[p] = -static_cast<double>(dist);
      }
    }
  }

  void add(int pattern, int label, int copies) {
    for (int t = 0; t < problem.view.forest.num_trees(); ++t) {
      counts[problem.cell_index(t, pattern_leaf[pattern][t], label)] += copies;
    }
    for (int c = 0; c < copies; ++c) current.emplace_back(pattern, label);
    if (!pattern_reg.empty() &&
        static_cast<int>(current.size()) > problem.known_rows.n()) {
      // Applies only to free rows; known rows are pinned before free ones.
      const int free_added = std::min(
          copies, static_cast<int>(current.size()) - problem.known_rows.n());
      reg_sum += free_added * pattern_reg[pattern];
    }
  }

  void remove(int pattern, int label, int copies) {
    if (!pattern_reg.empty() &&
        static_cast<int>(current.size()) > problem.known_rows.n()) {
      const int free_removed = std::min(
          copies, static_cast<int>(current.size()) - problem.known_rows.n());
      reg_sum -= free_removed * pattern_reg[pattern];
    }
    for (int t = 0; t < problem.view.forest.num_trees(); ++t) {
      counts[problem.cell_index(t, pattern_leaf[pattern][t], label)] -= copies;
    }
    current.resize(current.size() - copies);
  }

  void score_leaf() {
    ++evaluated;
    double hard = 0;
    double soft = 0;
    for (int i = 0; i < problem.num_cells; ++i) {
      const long long delta = problem.noisy_counts[i] - counts[i];
      hard += problem.noise.log_pmf(delta);
      soft += problem.noise.soft_log_pmf(delta);
    }
    const double hard_obj = composite_objective(problem, hard, reg_sum);
    const double soft_obj = composite_objective(problem, soft, reg_sum);

    if (hard_obj > kNegInf) {
      if (!best_is_hard || hard_obj > best_hard ||
          (hard_obj == best_hard && canonically_smaller())) {
        best_hard = hard_obj;
        best_soft = soft_obj;
        best_is_hard = true;
        best_assignment = current;
        have_best = true;
      }
    } else if (!best_is_hard) {
      if (!have_best || soft_obj > best_soft ||
          (soft_obj == best_soft && canonically_smaller())) {
        best_soft = soft_obj;
        best_assignment = current;
        have_best = true;
      }
    }
  }

  // Lexicographic comparison of the canonical (sorted) row multisets.
  bool canonically_smaller() {
    if (!have_best) return true;
    auto canon = [&](const std::vector<std::pair<int, int>>& assignment) {
      std::vector<std::pair<std::vector<std::uint8_t>, int>> rows;
      rows.reserve(assignment.size());
      for (auto [p, label] : assignment) {
        rows.emplace_back(patterns[p], label);
      }
      std::sort(rows.begin(), rows.end());
      return rows;
    };
    return canon(current) < canon(best_assignment);
  }

  // Unordered multisets: item = pattern * C + label, nondecreasing order.
  void recurse_multiset(std::size_t item, int remaining) {
    if (remaining == 0) {
      score_leaf();
      return;
    }
    const std::size_t num_items = patterns.size() * problem.num_classes;
    if (item + 1 == num_items) {
      const int p = static_cast<int>(item) / problem.num_classes;
      const int label = static_cast<int>(item) % problem.num_classes;
      add(p, label, remaining);
      score_leaf();
      remove(p, label, remaining);
      return;
    }
    const int p = static_cast<int>(item) / problem.num_classes;
    const int label = static_cast<int>(item) % problem.num_classes;
    for (int c = remaining; c >= 0; --c) {
      if (c > 0) add(p, label, c);
      recurse_multiset(item + 1, remaining - c);
      if (c > 0) remove(p, label, c);
    }
  }

  // Ordered rows with per-row candidate lists (pins break exchangeability).
  void recurse_sequence(const std::vector<std::vector<std::pair<int, int>>>&
                            row_candidates,
                        std::size_t row) {
    if (row == row_candidates.size()) {
      score_leaf();
      return;
    }
    for (auto [p, label] : row_candidates[row]) {
      add(p, label, 1);
      recurse_sequence(row_candidates, row + 1);
      remove(p, label, 1);
    }
  }
};

int find_pattern(const std::vector<std::vector<std::uint8_t>>& patterns,
                 const std::vector<std::uint8_t>& row) {
  auto it = std::lower_bound(patterns.begin(), patterns.end(), row);
  if (it == patterns.end() || *it != row) {
    throw std::invalid_argument("row is not a valid one-hot pattern");
  }
  return static_cast<int>(it - patterns.begin());
}

}  // namespace

ExactResult solve_exact(const ReconstructionProblem& problem,
                        const ExactLimits& limits) {
  Enumerator en(problem);
  en.patterns =
      enumerate_valid_patterns(problem.num_features, problem.view.groups);
  en.route_patterns();

  const double log_ceiling = std::log(limits.ceiling);
  const double log_items =
      std::log(static_cast<double>(en.patterns.size()) * problem.num_classes);

  if (problem.threat == ThreatModel::full ||
      problem.threat == ThreatModel::unknown_n) {
    for (int n = problem.n_min(); n <= problem.n_max(); ++n) {
      if (n * log_items > log_ceiling) {
        throw std::runtime_error("exact search space exceeds the ceiling");
      }
    }
    for (int n = problem.n_min(); n <= problem.n_max(); ++n) {
      en.recurse_multiset(0, n);
    }
  } else {
    // Candidate lists per row; known/pinned rows may have a single entry.
    const int n = problem.n_exact;
    std::vector<std::vector<std::pair<int, int>>> row_candidates(n);
    if (problem.threat == ThreatModel::partial) {
      const auto& kc = problem.known_columns;
      for (int k = 0; k < n; ++k) {
        for (std::size_t p = 0; p < en.patterns.size(); ++p) {
          bool ok = true;
          for (std::size_t j = 0; j < kc.columns.size(); ++j) {
            ok = ok && en.patterns[p][kc.columns[j]] == kc.values[k][j];
          }
          if (!ok) continue;
          for (int c = 0; c < problem.num_classes; ++c) {
            row_candidates[k].emplace_back(static_cast<int>(p), c);
          }
        }
        if (row_candidates[k].empty()) {
          throw std::runtime_error("pinned columns admit no valid pattern");
        }
      }
    } else {  // informed
      const auto& known = problem.known_rows;
      for (int k = 0; k < known.n(); ++k) {
        row_candidates[k].emplace_back(find_pattern(en.patterns, known.rows[k]),
                                       known.labels[k]);
      }
      for (int k = known.n(); k < n; ++k) {
        for (std::size_t p = 0; p < en.patterns.size(); ++p) {
          for (int c = 0; c < problem.num_classes; ++c) {
            row_candidates[k].emplace_back(static_cast<int>(p), c);
          }
        }
      }
    }
    double log_space = 0;
    for (const auto& cands : row_candidates) {
      log_space += std::log(static_cast<double>(cands.size()));
    }
    if (log_space > log_ceiling) {
      throw std::runtime_error("exact search space exceeds the ceiling");
    }
    en.recurse_sequence(row_candidates, 0);
  }

  ExactResult result;
  result.evaluated = en.evaluated;
  result.status =
      en.best_is_hard ? ExactStatus::optimal : ExactStatus::infeasible_hard;

  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<int> labels;
  for (auto [p, label] : en.best_assignment) {
    rows.push_back(en.patterns[p]);
    labels.push_back(label);
  }
  result.best = score_solution(problem, std::move(rows), std::move(labels));
  return result;
}

}  // namespace dpaudit
