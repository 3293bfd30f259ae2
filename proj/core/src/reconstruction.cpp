#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dpaudit/reconstruction.hpp"
#include "dpaudit/serialize.hpp"

namespace dpaudit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_groups(const std::vector<OneHotGroup>& groups, int num_features) {
  std::vector<char> seen(num_features, 0);
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("group smaller than 2");
    for (int j : g) {
      if (j < 0 || j >= num_features) {
        throw std::invalid_argument("group column out of range");
      }
      if (seen[j]) throw std::invalid_argument("column in two groups");
      seen[j] = 1;
    }
  }
}

// Two-sided 97.5% Student quantiles for dof 1..30; beyond that the normal
// 1.96 is used.
double student_t95(int dof) {
  static const double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof <= 0) return 1.96;
  if (dof <= 30) return table[dof - 1];
  return 1.96;
}

}  // namespace

ForestView attacker_view(const Forest& forest,
                         const std::vector<OneHotGroup>& groups) {
  validate_groups(groups, forest.num_features);
  ForestView view;
  view.forest = forest;
  view.forest.n_train_true = -1;
  for (auto& tree : view.forest.trees) {
    for (auto& node : tree.nodes) node.true_counts.clear();
  }
  view.groups = groups;
  return view;
}

ForestView forest_view_from_json(const std::string& text,
                                 const std::vector<OneHotGroup>& groups) {
  Forest forest = forest_from_json(text);
  if (forest.n_train_true >= 0) {
    throw std::invalid_argument("forest view must not carry n_train");
  }
  for (const auto& tree : forest.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.true_counts.empty()) {
        throw std::invalid_argument("forest view must not carry true counts");
      }
      if (node.kind == TreeNode::Kind::leaf &&
          static_cast<int>(node.noisy_counts.size()) != forest.num_classes) {
        throw std::invalid_argument("forest view leaf missing noisy counts");
      }
    }
  }
  return attacker_view(forest, groups);
}

NInterval estimate_n_interval(const ForestView& view,
                              const NoiseModel& noise) {
  const Forest& forest = view.forest;
  const int num_trees = forest.num_trees();
  if (num_trees < 1) throw std::invalid_argument("empty forest");

  double total = 0;
  std::size_t max_leaves = 0;
  for (const auto& tree : forest.trees) {
    long long tree_total = 0;
    for (const auto& leaf : tree.leaves) {
      for (long long c : tree.nodes[leaf.node].noisy_counts) tree_total += c;
    }
    total += static_cast<double>(tree_total);
    max_leaves = std::max(max_leaves, tree.leaves.size());
  }

  NInterval interval;
  interval.n_star = total / num_trees;
  interval.sigma_zeta =
      std::isinf(noise.epsilon_v)
          ? 0.0
          : std::sqrt(2.0 * static_cast<double>(max_leaves) *
                      forest.num_classes) /
                noise.epsilon_v;
  if (num_trees == 1) {
    // No dof for a t fit; fall back to the normal coefficient.
    interval.t95 = 1.96;
    interval.normal_fallback = true;
  } else {
    interval.t95 = student_t95(num_trees - 1);
  }
  const double half =
      interval.t95 * interval.sigma_zeta / std::sqrt(double(num_trees));
  // Outward rounding keeps the interval conservative.
  interval.n_min = std::max(
      1, static_cast<int>(std::floor(interval.n_star - half)));
  interval.n_max = std::max(
      interval.n_min, static_cast<int>(std::ceil(interval.n_star + half)));
  return interval;
}

int ReconstructionProblem::n_min() const {
  return threat == ThreatModel::unknown_n ? n_interval.n_min : n_exact;
}

int ReconstructionProblem::n_max() const {
  return threat == ThreatModel::unknown_n ? n_interval.n_max : n_exact;
}

ReconstructionProblem build_problem(const ForestView& view, ThreatModel threat,
                                    const ProblemOptions& options) {
  const Forest& forest = view.forest;
  if (forest.num_trees() < 1) throw std::invalid_argument("empty forest");
  for (const auto& tree : forest.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.true_counts.empty()) {
        throw std::invalid_argument("problem input carries true counts");
      }
    }
  }
  validate_groups(view.groups, forest.num_features);

  ReconstructionProblem problem;
  problem.view = view;
  problem.noise = NoiseModel::make(forest.epsilon_per_leaf());
  problem.threat = threat;
  problem.num_classes = forest.num_classes;
  problem.num_features = forest.num_features;

  problem.cell_offset.resize(forest.num_trees());
  int offset = 0;
  for (int t = 0; t < forest.num_trees(); ++t) {
    problem.cell_offset[t] = offset;
    const auto& tree = forest.trees[t];
    for (const auto& leaf : tree.leaves) {
      const auto& counts = tree.nodes[leaf.node].noisy_counts;
      if (static_cast<int>(counts.size()) != forest.num_classes) {
        throw std::invalid_argument("leaf missing noisy counts");
      }
      for (long long c : counts) problem.noisy_counts.push_back(c);
    }
    offset += static_cast<int>(tree.leaves.size()) * forest.num_classes;
  }
  problem.num_cells = offset;

  if (threat == ThreatModel::unknown_n) {
    if (options.n_train >= 0) {
      throw std::invalid_argument("unknown_n mode estimates N itself");
    }
    problem.n_interval = estimate_n_interval(view, problem.noise);
  } else {
    if (options.n_train < 1) {
      throw std::invalid_argument("n_train must be at least 1");
    }
    problem.n_exact = options.n_train;
  }

  if (threat == ThreatModel::partial) {
    const auto& kc = options.known_columns;
    if (kc.columns.empty()) {
      throw std::invalid_argument("partial mode needs known columns");
    }
    for (int j : kc.columns) {
      if (j < 0 || j >= forest.num_features) {
        throw std::invalid_argument("known column out of range");
      }
    }
    if (static_cast<int>(kc.values.size()) != options.n_train) {
      throw std::invalid_argument("known column values must cover every row");
    }
    for (const auto& vals : kc.values) {
      if (vals.size() != kc.columns.size()) {
        throw std::invalid_argument("known column value width mismatch");
      }
      for (std::uint8_t v : vals) {
        if (v > 1) throw std::invalid_argument("known values must be binary");
      }
    }
    // Pins inside a one-hot group must stay satisfiable: at most one pinned
    // one, and a fully pinned group needs exactly one.
    for (const auto& g : view.groups) {
      std::vector<int> pinned_slots;
      for (std::size_t j = 0; j < kc.columns.size(); ++j) {
        if (std::find(g.begin(), g.end(), kc.columns[j]) != g.end()) {
          pinned_slots.push_back(static_cast<int>(j));
        }
      }
      if (pinned_slots.empty()) continue;
      for (const auto& vals : kc.values) {
        int ones = 0;
        for (int j : pinned_slots) ones += vals[j];
        if (ones > 1 || (pinned_slots.size() == g.size() && ones != 1)) {
          throw std::invalid_argument("pinned values break a one-hot group");
        }
      }
    }
    problem.known_columns = kc;
  }

  if (threat == ThreatModel::informed) {
    const auto& known = options.known_rows;
    known.validate();
    if (known.n() < 1 || known.n() >= options.n_train) {
      throw std::invalid_argument(
          "informed mode needs between 1 and N-1 known rows");
    }
    if (known.m() != forest.num_features) {
      throw std::invalid_argument("known rows feature width mismatch");
    }
    for (int label : known.labels) {
      if (label >= forest.num_classes) {
        throw std::invalid_argument("known row label out of range");
      }
    }
    problem.known_rows = known;
    problem.alpha = options.alpha >= 0 ? options.alpha
                                       : 20.0 * forest.epsilon_total;
    if (std::isinf(problem.alpha)) {
      throw std::invalid_argument(
          "informed mode needs a finite alpha under the no-noise sentinel");
    }
  }

  return problem;
}

double composite_objective(const ReconstructionProblem& problem,
                           double log_likelihood_raw, double regularizer_raw) {
  if (problem.threat != ThreatModel::informed) return log_likelihood_raw;
  const int num_known = problem.known_rows.n();
  const int num_free = problem.n_exact - num_known;
  const double pairs = static_cast<double>(num_known) * num_free;
  return regularizer_raw / pairs +
         problem.alpha * (log_likelihood_raw / problem.num_cells);
}

namespace {

double informed_regularizer(const ReconstructionProblem& problem,
                            const std::vector<std::vector<std::uint8_t>>& rows) {
  if (problem.threat != ThreatModel::informed) return 0;
  const int num_known = problem.known_rows.n();
  double total = 0;
  for (std::size_t f = num_known; f < rows.size(); ++f) {
    for (const auto& known : problem.known_rows.rows) {
      int dist = 0;
      for (std::size_t j = 0; j < known.size(); ++j) {
        dist += rows[f][j] != known[j];
      }
      total -= dist;
    }
  }
  return total;
}

}  // namespace

CandidateSolution score_solution(const ReconstructionProblem& problem,
                                 std::vector<std::vector<std::uint8_t>> rows,
                                 std::vector<int> labels) {
  if (rows.size() != labels.size()) {
    throw std::invalid_argument("rows and labels must pair up");
  }
  CandidateSolution solution;
  solution.rows = std::move(rows);
  solution.labels = std::move(labels);

  solution.derived_counts.assign(problem.num_cells, 0);
  const Forest& forest = problem.view.forest;
  for (std::size_t k = 0; k < solution.rows.size(); ++k) {
    for (int t = 0; t < forest.num_trees(); ++t) {
      const int leaf = route_example(forest.trees[t], solution.rows[k]);
      ++solution.derived_counts[problem.cell_index(t, leaf,
                                                   solution.labels[k])];
    }
  }

  solution.deltas.resize(problem.num_cells);
  for (int i = 0; i < problem.num_cells; ++i) {
    solution.deltas[i] = problem.noisy_counts[i] - solution.derived_counts[i];
  }
  solution.log_likelihood_term =
      log_likelihood(problem.noise, solution.deltas, TailMode::hard);
  solution.hard_feasible = solution.log_likelihood_term > kNegInf;
  solution.regularizer_term = informed_regularizer(problem, solution.rows);
  solution.objective = composite_objective(problem, solution.log_likelihood_term,
                                           solution.regularizer_term);
  return solution;
}

std::string check_solution(const ReconstructionProblem& problem,
                           const CandidateSolution& solution) {
  std::ostringstream err;
  const Forest& forest = problem.view.forest;
  const int n = static_cast<int>(solution.rows.size());

  if (solution.labels.size() != solution.rows.size()) {
    return "labels do not pair with rows";
  }
  if (n < problem.n_min() || n > problem.n_max()) {
    err << "row count " << n << " outside [" << problem.n_min() << ", "
        << problem.n_max() << "]";
    return err.str();
  }

  for (int k = 0; k < n; ++k) {
    const auto& row = solution.rows[k];
    if (static_cast<int>(row.size()) != problem.num_features) {
      return "row width mismatch";
    }
    for (std::uint8_t v : row) {
      if (v > 1) return "non-binary attribute value";
    }
    if (solution.labels[k] < 0 || solution.labels[k] >= problem.num_classes) {
      return "label out of range";
    }
    for (const auto& g : problem.view.groups) {
      int ones = 0;
      for (int j : g) ones += row[j];
      if (ones != 1) {
        err << "row " << k << " breaks a one-hot group";
        return err.str();
      }
    }
  }

  // Threat-model pins.
  if (problem.threat == ThreatModel::partial) {
    const auto& kc = problem.known_columns;
    for (int k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < kc.columns.size(); ++j) {
        if (solution.rows[k][kc.columns[j]] != kc.values[k][j]) {
          err << "row " << k << " violates a pinned column";
          return err.str();
        }
      }
    }
  }
  if (problem.threat == ThreatModel::informed) {
    const auto& known = problem.known_rows;
    for (int k = 0; k < known.n(); ++k) {
      if (solution.rows[k] != known.rows[k]) {
        err << "known row " << k << " was altered";
        return err.str();
      }
      if (solution.labels[k] != known.labels[k]) {
        err << "known label " << k << " was altered";
        return err.str();
      }
    }
  }

  // Counts re-derived from leaf predicate sets, not the routing walk: a row
  // belongs to the unique leaf whose positive set is all ones and negative
  // set all zeros in the row.
  std::vector<long long> counts(problem.num_cells, 0);
  for (int k = 0; k < n; ++k) {
    const auto& row = solution.rows[k];
    for (int t = 0; t < forest.num_trees(); ++t) {
      const auto& tree = forest.trees[t];
      int matched = -1;
      for (std::size_t v = 0; v < tree.leaves.size(); ++v) {
        const auto& leaf = tree.leaves[v];
        bool ok = true;
        for (int a : leaf.phi_plus) ok = ok && row[a] == 1;
        for (int a : leaf.phi_minus) ok = ok && row[a] == 0;
        if (!ok) continue;
        if (matched >= 0) {
          err << "row " << k << " matches two leaves in tree " << t;
          return err.str();
        }
        matched = static_cast<int>(v);
      }
      if (matched < 0) {
        err << "row " << k << " matches no leaf in tree " << t;
        return err.str();
      }
      ++counts[problem.cell_index(t, matched, solution.labels[k])];
    }
  }
  if (counts != solution.derived_counts) return "derived counts are wrong";

  for (int t = 0; t < forest.num_trees(); ++t) {
    long long total = 0;
    const int cells =
        static_cast<int>(forest.trees[t].leaves.size()) * problem.num_classes;
    for (int i = 0; i < cells; ++i) total += counts[problem.cell_offset[t] + i];
    if (total != n) {
      err << "tree " << t << " counts sum to " << total << ", expected " << n;
      return err.str();
    }
  }

  if (solution.deltas.size() != static_cast<std::size_t>(problem.num_cells)) {
    return "delta vector size mismatch";
  }
  for (int i = 0; i < problem.num_cells; ++i) {
    if (solution.deltas[i] != problem.noisy_counts[i] - counts[i]) {
      return "deltas do not equal noisy minus derived";
    }
  }

  bool hard = true;
  for (long long d : solution.deltas) {
    hard = hard && std::llabs(d) <= problem.noise.gamma;
  }
  if (hard != solution.hard_feasible) return "hard_feasible flag is wrong";

  const double loglik =
      log_likelihood(problem.noise, solution.deltas, TailMode::hard);
  const bool both_neg_inf =
      loglik == kNegInf && solution.log_likelihood_term == kNegInf;
  if (!both_neg_inf &&
      std::abs(loglik - solution.log_likelihood_term) > 1e-9) {
    return "log-likelihood term is wrong";
  }
  const double reg = informed_regularizer(problem, solution.rows);
  if (std::abs(reg - solution.regularizer_term) > 1e-9) {
    return "regularizer term is wrong";
  }
  const double objective = composite_objective(problem, loglik, reg);
  const bool obj_both_neg_inf =
      objective == kNegInf && solution.objective == kNegInf;
  if (!obj_both_neg_inf && std::abs(objective - solution.objective) > 1e-9) {
    return "objective is inconsistent with its terms";
  }
  return "";
}

BinaryDataset extract_reconstruction(const CandidateSolution& solution,
                                     const std::vector<OneHotGroup>& groups) {
  std::vector<std::pair<std::vector<std::uint8_t>, int>> paired;
  paired.reserve(solution.rows.size());
  for (std::size_t k = 0; k < solution.rows.size(); ++k) {
    paired.emplace_back(solution.rows[k], solution.labels[k]);
  }
  std::sort(paired.begin(), paired.end());

  BinaryDataset out;
  out.groups = groups;
  for (auto& [row, label] : paired) {
    out.rows.push_back(std::move(row));
    out.labels.push_back(label);
  }
  out.num_classes = 2;
  for (int label : out.labels) {
    out.num_classes = std::max(out.num_classes, label + 1);
  }
  out.validate();
  return out;
}

std::vector<std::vector<std::uint8_t>> enumerate_valid_patterns(
    int num_features, const std::vector<OneHotGroup>& groups) {
  validate_groups(groups, num_features);
  std::vector<char> grouped(num_features, 0);
  for (const auto& g : groups) {
    for (int j : g) grouped[j] = 1;
  }
  std::vector<int> free_cols;
  for (int j = 0; j < num_features; ++j) {
    if (!grouped[j]) free_cols.push_back(j);
  }

  // Mixed-radix digits: one binary digit per free column, one slot digit
  // per group.
  std::vector<std::size_t> radix(free_cols.size(), 2);
  for (const auto& g : groups) radix.push_back(g.size());
  std::size_t total = 1;
  for (std::size_t r : radix) {
    total *= r;
    if (total > (1u << 24)) {
      throw std::runtime_error("pattern space too large to enumerate");
    }
  }

  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<std::uint8_t> row(num_features, 0);
    std::size_t rem = idx;
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
      row[free_cols[f]] = static_cast<std::uint8_t>(rem % 2);
      rem /= 2;
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
      row[groups[g][rem % groups[g].size()]] = 1;
      rem /= groups[g].size();
    }
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dpaudit
