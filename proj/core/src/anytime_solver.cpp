#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "dpaudit/anytime_solver.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Finite stand-in for the infinite soft-tail slope under the no-noise
// sentinel; keeps the annealing landscape finite while still dominating
// every finite likelihood difference.
constexpr double kMaxSlope = 1e6;

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// Column mutability and group structure shared by every worker.
struct MoveSpace {
  std::vector<int> free_cols;    // flippable: ungrouped and unpinned
  std::vector<int> col_group;    // column -> group index or -1
  std::vector<char> col_pinned;  // partial mode pins (same columns per row)
  // Allowed columns for each group's single 1. Partial mode is per row
  // (pinned values differ); other modes share one table.
  std::vector<std::vector<int>> shared_targets;
  std::vector<std::vector<std::vector<int>>> row_targets;
  int first_mutable_row = 0;  // informed mode: known rows come first, frozen
  bool allow_resize = false;
  bool can_relabel = false;

  const std::vector<int>& targets(int row, int group) const {
    return row_targets.empty() ? shared_targets[group]
                               : row_targets[row][group];
  }
};

MoveSpace build_move_space(const ReconstructionProblem& p) {
  MoveSpace ms;
  const int m = p.num_features;
  ms.col_group.assign(m, -1);
  for (std::size_t g = 0; g < p.view.groups.size(); ++g) {
    for (int j : p.view.groups[g]) ms.col_group[j] = static_cast<int>(g);
  }
  ms.col_pinned.assign(m, 0);
  if (p.threat == ThreatModel::partial) {
    for (int j : p.known_columns.columns) ms.col_pinned[j] = 1;
  }
  for (int j = 0; j < m; ++j) {
    if (ms.col_group[j] < 0 && !ms.col_pinned[j]) ms.free_cols.push_back(j);
  }

  auto targets_for = [&](int row) {
    std::vector<std::vector<int>> out(p.view.groups.size());
    for (std::size_t g = 0; g < p.view.groups.size(); ++g) {
      bool fixed = false;
      for (std::size_t s = 0; s < p.known_columns.columns.size(); ++s) {
        const int col = p.known_columns.columns[s];
        if (ms.col_group[col] == static_cast<int>(g) &&
            p.known_columns.values[row][s] == 1) {
          fixed = true;  // a pinned 1 freezes the whole group
        }
      }
      if (fixed) continue;
      for (int j : p.view.groups[g]) {
        if (!ms.col_pinned[j]) out[g].push_back(j);
      }
    }
    return out;
  };

  if (p.threat == ThreatModel::partial) {
    ms.row_targets.resize(p.n_exact);
    for (int k = 0; k < p.n_exact; ++k) ms.row_targets[k] = targets_for(k);
  } else {
    ms.shared_targets.resize(p.view.groups.size());
    for (std::size_t g = 0; g < p.view.groups.size(); ++g) {
      ms.shared_targets[g] = p.view.groups[g];
    }
  }

  if (p.threat == ThreatModel::informed) {
    ms.first_mutable_row = p.known_rows.n();
  }
  ms.allow_resize = p.threat == ThreatModel::unknown_n;
  ms.can_relabel = p.num_classes >= 2;
  return ms;
}

struct Undo {
  enum Kind { mutate, added, removed } kind = mutate;
  int row = -1;
  std::vector<std::pair<int, std::uint8_t>> old_bits;
  int old_label = -1;
  std::vector<int> old_leaves;
  std::vector<std::uint8_t> rem_row;
  int rem_label = -1;
  std::vector<int> rem_leaves;
};

struct Worker {
  const ReconstructionProblem& p;
  const MoveSpace& ms;
  const AnytimeOptions& opt;
  int worker_index;
  Clock::time_point t0;

  Rng rng{0};
  int num_trees;
  double slope;
  double reg_pairs = 1;

  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<int> labels;
  std::vector<std::vector<int>> row_leaf;
  std::vector<long long> counts;
  double soft_sum = 0;
  long long violations = 0;
  long long reg_dist = 0;  // informed: sum of free-to-known L1 distances
  std::vector<long long> known_ones;

  std::vector<int> violated_cells;
  std::vector<int> imperfect_cells;

  bool inc_valid = false;
  bool inc_hard = false;
  double inc_obj = kNegInf;
  std::vector<std::vector<std::uint8_t>> inc_rows;
  std::vector<int> inc_labels;
  double last_improve_wall = 0;

  std::vector<TracePoint> trace;
  double first_feasible = -1;
  long long moves = 0;

  Worker(const ReconstructionProblem& problem, const MoveSpace& space,
         const AnytimeOptions& options, int index, Clock::time_point start)
      : p(problem), ms(space), opt(options), worker_index(index), t0(start) {
    num_trees = p.view.forest.num_trees();
    slope = std::min(p.noise.tail_slope, kMaxSlope);
    if (p.threat == ThreatModel::informed) {
      const int num_known = p.known_rows.n();
      reg_pairs = static_cast<double>(num_known) * (p.n_exact - num_known);
      known_ones.assign(p.num_features, 0);
      for (const auto& row : p.known_rows.rows) {
        for (int j = 0; j < p.num_features; ++j) known_ones[j] += row[j];
      }
    }
  }

  double wall() const { return seconds_between(t0, Clock::now()); }

  double cell_score(long long delta) const {
    const long long a = std::llabs(delta);
    if (a <= p.noise.gamma) return p.noise.log_table[a];
    return p.noise.log_table[p.noise.gamma] - (a - p.noise.gamma) * slope;
  }

  double composite() const {
    if (p.threat != ThreatModel::informed) return soft_sum;
    return -static_cast<double>(reg_dist) / reg_pairs +
           p.alpha * (soft_sum / p.num_cells);
  }

  void bump(int cell, long long d) {
    const long long before = p.noisy_counts[cell] - counts[cell];
    counts[cell] += d;
    const long long after = before - d;
    soft_sum += cell_score(after) - cell_score(before);
    violations += (std::llabs(after) > p.noise.gamma) -
                  (std::llabs(before) > p.noise.gamma);
  }

  void detach(int k) {
    for (int t = 0; t < num_trees; ++t) {
      bump(p.cell_index(t, row_leaf[k][t], labels[k]), -1);
    }
  }
  void attach(int k) {
    for (int t = 0; t < num_trees; ++t) {
      bump(p.cell_index(t, row_leaf[k][t], labels[k]), +1);
    }
  }
  void reroute(int k) {
    for (int t = 0; t < num_trees; ++t) {
      row_leaf[k][t] = route_example(p.view.forest.trees[t], rows[k]);
    }
  }

  // Regularizer bookkeeping: a bit of 1 disagrees with (K - ones[j]) known
  // rows, a bit of 0 with ones[j].
  long long bit_cost(int col, std::uint8_t v) const {
    return v ? p.known_rows.n() - known_ones[col] : known_ones[col];
  }

  void set_bit(int k, int col, std::uint8_t v) {
    if (rows[k][col] == v) return;
    if (p.threat == ThreatModel::informed && k >= ms.first_mutable_row) {
      reg_dist += bit_cost(col, v) - bit_cost(col, rows[k][col]);
    }
    rows[k][col] = v;
  }

  void apply_mutation(int k,
                      const std::vector<std::pair<int, std::uint8_t>>& bits,
                      int new_label, Undo& undo) {
    undo.kind = Undo::mutate;
    undo.row = k;
    undo.old_bits.clear();
    for (auto [col, v] : bits) {
      (void)v;
      undo.old_bits.emplace_back(col, rows[k][col]);
    }
    undo.old_label = labels[k];
    undo.old_leaves = row_leaf[k];
    detach(k);
    for (auto [col, v] : bits) set_bit(k, col, v);
    labels[k] = new_label;
    reroute(k);
    attach(k);
  }

  void add_row(std::vector<std::uint8_t> row, int label, Undo& undo) {
    undo.kind = Undo::added;
    undo.row = static_cast<int>(rows.size());
    rows.push_back(std::move(row));
    labels.push_back(label);
    row_leaf.emplace_back(num_trees, 0);
    reroute(undo.row);
    attach(undo.row);
  }

  void remove_row(int k, Undo& undo) {
    undo.kind = Undo::removed;
    undo.row = k;
    undo.rem_row = rows[k];
    undo.rem_label = labels[k];
    undo.rem_leaves = row_leaf[k];
    detach(k);
    const int last = static_cast<int>(rows.size()) - 1;
    if (k != last) {
      rows[k] = std::move(rows[last]);
      labels[k] = labels[last];
      row_leaf[k] = std::move(row_leaf[last]);
    }
    rows.pop_back();
    labels.pop_back();
    row_leaf.pop_back();
  }

  void undo_move(const Undo& undo) {
    switch (undo.kind) {
      case Undo::mutate: {
        const int k = undo.row;
        detach(k);
        for (auto [col, v] : undo.old_bits) set_bit(k, col, v);
        labels[k] = undo.old_label;
        row_leaf[k] = undo.old_leaves;
        attach(k);
        break;
      }
      case Undo::added: {
        Undo scratch;
        remove_row(undo.row, scratch);
        break;
      }
      case Undo::removed: {
        const int k = undo.row;
        // The removed slot currently holds what used to be the last row;
        // push it back to the end and restore the removed row in place.
        if (k == static_cast<int>(rows.size())) {
          rows.push_back(undo.rem_row);
          labels.push_back(undo.rem_label);
          row_leaf.push_back(undo.rem_leaves);
        } else {
          std::vector<std::uint8_t> moved = std::move(rows[k]);
          std::vector<int> moved_leaves = std::move(row_leaf[k]);
          const int moved_label = labels[k];
          rows[k] = undo.rem_row;
          labels[k] = undo.rem_label;
          row_leaf[k] = undo.rem_leaves;
          rows.push_back(std::move(moved));
          labels.push_back(moved_label);
          row_leaf.push_back(std::move(moved_leaves));
        }
        attach(k);
        break;
      }
    }
  }

  // --- construction -------------------------------------------------------

  std::uint8_t pin_value(int row, int col) const {
    if (p.threat != ThreatModel::partial) return 2;
    const auto& kc = p.known_columns;
    for (std::size_t s = 0; s < kc.columns.size(); ++s) {
      if (kc.columns[s] == col) return kc.values[row][s];
    }
    return 2;  // unpinned marker
  }

  // Places each group's 1 legally, preferring `prefer` and avoiding `avoid`
  // columns when possible.
  void normalize_groups(std::vector<std::uint8_t>& row, int row_index,
                        const std::vector<char>& prefer,
                        const std::vector<char>& avoid) {
    for (std::size_t g = 0; g < p.view.groups.size(); ++g) {
      const auto& group = p.view.groups[g];
      int chosen = -1;
      for (int j : group) {
        if (pin_value(row_index, j) == 1) chosen = j;
      }
      if (chosen < 0) {
        for (int j : group) {
          if (row[j] && prefer[j] && pin_value(row_index, j) != 0) chosen = j;
        }
      }
      if (chosen < 0) {
        for (int j : group) {
          if (row[j] && pin_value(row_index, j) != 0 && !avoid[j]) chosen = j;
        }
      }
      if (chosen < 0) {
        for (int j : group) {
          if (row[j] && pin_value(row_index, j) != 0) chosen = j;
        }
      }
      if (chosen < 0) {
        std::vector<int> allowed;
        for (int j : group) {
          if (pin_value(row_index, j) != 0 && !avoid[j]) allowed.push_back(j);
        }
        if (allowed.empty()) {
          for (int j : group) {
            if (pin_value(row_index, j) != 0) allowed.push_back(j);
          }
        }
        chosen = allowed[rng.uniform_int(allowed.size())];
      }
      for (int j : group) row[j] = j == chosen;
    }
  }

  // A row steered toward the given leaf's predicate, pins respected.
  std::vector<std::uint8_t> build_toward(int tree, int leaf_idx,
                                         int row_index) {
    std::vector<std::uint8_t> row(p.num_features, 0);
    for (int j = 0; j < p.num_features; ++j) {
      const std::uint8_t pin = pin_value(row_index, j);
      if (pin != 2) row[j] = pin;
    }
    const auto& leaf = p.view.forest.trees[tree].leaves[leaf_idx];
    std::vector<char> prefer(p.num_features, 0);
    std::vector<char> avoid(p.num_features, 0);
    for (int a : leaf.phi_plus) {
      prefer[a] = 1;
      if (pin_value(row_index, a) == 2) row[a] = 1;
    }
    for (int a : leaf.phi_minus) {
      avoid[a] = 1;
      if (pin_value(row_index, a) == 2) row[a] = 0;
    }
    for (int j : ms.free_cols) {
      if (!prefer[j] && !avoid[j]) {
        row[j] = static_cast<std::uint8_t>(rng.uniform_int(2));
      }
    }
    normalize_groups(row, row_index, prefer, avoid);
    return row;
  }

  std::vector<std::uint8_t> random_valid_row(int row_index) {
    std::vector<std::uint8_t> row(p.num_features, 0);
    for (int j = 0; j < p.num_features; ++j) {
      const std::uint8_t pin = pin_value(row_index, j);
      row[j] = pin != 2 ? pin : static_cast<std::uint8_t>(rng.uniform_int(2));
    }
    std::vector<char> none(p.num_features, 0);
    normalize_groups(row, row_index, none, none);
    return row;
  }

  int initial_n() const {
    if (p.threat != ThreatModel::unknown_n) return p.n_exact;
    const int guess = static_cast<int>(std::llround(p.n_interval.n_star));
    return std::clamp(guess, p.n_interval.n_min, p.n_interval.n_max);
  }

  void greedy_init() {
    const int n = initial_n();
    rows.clear();
    labels.clear();
    row_leaf.clear();
    counts.assign(p.num_cells, 0);
    soft_sum = 0;
    violations = 0;
    reg_dist = 0;
    for (int i = 0; i < p.num_cells; ++i) {
      soft_sum += cell_score(p.noisy_counts[i]);
      violations += std::llabs(p.noisy_counts[i]) > p.noise.gamma;
    }

    for (int k = 0; k < n; ++k) {
      std::vector<std::uint8_t> row;
      int label = 0;
      if (p.threat == ThreatModel::informed && k < p.known_rows.n()) {
        row = p.known_rows.rows[k];
        label = p.known_rows.labels[k];
      } else {
        // Target the most under-filled cell of a round-robin tree.
        const int t = k % num_trees;
        const auto& tree = p.view.forest.trees[t];
        int best_leaf = 0;
        int best_label = 0;
        long long best_remaining = std::numeric_limits<long long>::min();
        for (std::size_t v = 0; v < tree.leaves.size(); ++v) {
          for (int c = 0; c < p.num_classes; ++c) {
            const int cell = p.cell_index(t, static_cast<int>(v), c);
            const long long remaining = p.noisy_counts[cell] - counts[cell];
            if (remaining > best_remaining) {
              best_remaining = remaining;
              best_leaf = static_cast<int>(v);
              best_label = c;
            }
          }
        }
        row = build_toward(t, best_leaf, k);
        label = best_label;
      }
      rows.push_back(std::move(row));
      labels.push_back(label);
      row_leaf.emplace_back(num_trees, 0);
      reroute(k);
      attach(k);
    }
  }

  // --- proposals ----------------------------------------------------------

  int pick_mutable_row() {
    const int span = static_cast<int>(rows.size()) - ms.first_mutable_row;
    if (span <= 0) return -1;
    return ms.first_mutable_row + static_cast<int>(rng.uniform_int(span));
  }

  int group_one(int k, int group) const {
    for (int j : p.view.groups[group]) {
      if (rows[k][j]) return j;
    }
    return -1;
  }

  // Bits that set row k's column `a` to `v`, honoring group structure.
  // Returns false when pins or group targets forbid it.
  bool literal_bits(int k, int a, std::uint8_t v,
                    std::vector<std::pair<int, std::uint8_t>>& bits) {
    bits.clear();
    if (ms.col_pinned[a]) return false;
    const int g = ms.col_group[a];
    if (g < 0) {
      if (rows[k][a] == v) return false;
      bits.emplace_back(a, v);
      return true;
    }
    const auto& targets = ms.targets(k, g);
    if (v == 1) {
      if (rows[k][a]) return false;
      if (std::find(targets.begin(), targets.end(), a) == targets.end()) {
        return false;
      }
      const int cur = group_one(k, g);
      if (cur >= 0) bits.emplace_back(cur, 0);
      bits.emplace_back(a, 1);
      return true;
    }
    if (!rows[k][a]) return false;
    std::vector<int> others;
    for (int j : targets) {
      if (j != a) others.push_back(j);
    }
    if (others.empty()) return false;
    bits.emplace_back(a, 0);
    bits.emplace_back(others[rng.uniform_int(others.size())], 1);
    return true;
  }

  bool try_flip(Undo& undo) {
    if (ms.free_cols.empty()) return false;
    const int k = pick_mutable_row();
    if (k < 0) return false;
    const int col = ms.free_cols[rng.uniform_int(ms.free_cols.size())];
    apply_mutation(k, {{col, static_cast<std::uint8_t>(1 - rows[k][col])}},
                   labels[k], undo);
    return true;
  }

  bool try_swap(Undo& undo) {
    if (p.view.groups.empty()) return false;
    const int k = pick_mutable_row();
    if (k < 0) return false;
    std::vector<int> usable;
    for (std::size_t g = 0; g < p.view.groups.size(); ++g) {
      if (ms.targets(k, static_cast<int>(g)).size() >= 2) {
        usable.push_back(static_cast<int>(g));
      }
    }
    if (usable.empty()) return false;
    const int g = usable[rng.uniform_int(usable.size())];
    const int cur = group_one(k, g);
    const auto& targets = ms.targets(k, g);
    std::vector<int> others;
    for (int j : targets) {
      if (j != cur) others.push_back(j);
    }
    if (others.empty()) return false;
    const int target = others[rng.uniform_int(others.size())];
    std::vector<std::pair<int, std::uint8_t>> bits;
    if (cur >= 0) bits.emplace_back(cur, 0);
    bits.emplace_back(target, 1);
    apply_mutation(k, bits, labels[k], undo);
    return true;
  }

  bool try_relabel(Undo& undo, int forced_row = -1, int forced_label = -1) {
    if (!ms.can_relabel) return false;
    const int k = forced_row >= 0 ? forced_row : pick_mutable_row();
    if (k < 0) return false;
    int label = forced_label;
    if (label < 0) {
      label = static_cast<int>(rng.uniform_int(p.num_classes - 1));
      if (label >= labels[k]) ++label;
    }
    if (label == labels[k]) return false;
    apply_mutation(k, {}, label, undo);
    return true;
  }

  bool try_add(Undo& undo, std::vector<std::uint8_t> row = {}, int label = -1) {
    if (!ms.allow_resize ||
        static_cast<int>(rows.size()) >= p.n_interval.n_max) {
      return false;
    }
    if (row.empty()) {
      if (!rows.empty() && rng.uniform_int(2) == 0) {
        const int k = static_cast<int>(rng.uniform_int(rows.size()));
        row = rows[k];
        label = labels[k];
      } else {
        row = random_valid_row(static_cast<int>(rows.size()));
        label = static_cast<int>(rng.uniform_int(p.num_classes));
      }
    }
    add_row(std::move(row), label, undo);
    return true;
  }

  bool try_remove(Undo& undo) {
    if (!ms.allow_resize ||
        static_cast<int>(rows.size()) <= p.n_interval.n_min) {
      return false;
    }
    const int k = static_cast<int>(rng.uniform_int(rows.size()));
    remove_row(k, undo);
    return true;
  }

  void rebuild_guided_lists() {
    violated_cells.clear();
    imperfect_cells.clear();
    for (int i = 0; i < p.num_cells; ++i) {
      const long long delta = p.noisy_counts[i] - counts[i];
      if (delta == 0) continue;
      if (std::llabs(delta) > p.noise.gamma) violated_cells.push_back(i);
      if (imperfect_cells.size() < 4096) imperfect_cells.push_back(i);
    }
  }

  void decompose_cell(int cell, int& tree, int& leaf, int& label) const {
    tree = 0;
    while (tree + 1 < num_trees && p.cell_offset[tree + 1] <= cell) ++tree;
    const int local = cell - p.cell_offset[tree];
    leaf = local / p.num_classes;
    label = local % p.num_classes;
  }

  bool try_guided(Undo& undo) {
    const auto& list =
        violated_cells.empty() ? imperfect_cells : violated_cells;
    if (list.empty()) return false;
    const int cell = list[rng.uniform_int(list.size())];
    int t, v, c;
    decompose_cell(cell, t, v, c);
    const long long delta = p.noisy_counts[cell] - counts[cell];
    const auto& leaf = p.view.forest.trees[t].leaves[v];

    if (delta > 0) {
      // Deficit: route one more row into (t, v, c).
      if (ms.allow_resize && rng.uniform_int(4) == 0) {
        std::vector<std::uint8_t> row =
            build_toward(t, v, static_cast<int>(rows.size()));
        if (try_add(undo, std::move(row), c)) return true;
      }
      for (int attempt = 0; attempt < 4; ++attempt) {
        const int k = pick_mutable_row();
        if (k < 0) return false;
        if (row_leaf[k][t] == static_cast<int>(v) && labels[k] != c) {
          if (try_relabel(undo, k, c)) return true;
          continue;
        }
        if (row_leaf[k][t] == static_cast<int>(v)) continue;
        // Satisfy one currently broken predicate literal.
        std::vector<std::pair<int, std::uint8_t>> fixes;
        std::vector<std::pair<int, std::uint8_t>> bits;
        for (int a : leaf.phi_plus) {
          if (!rows[k][a]) fixes.emplace_back(a, 1);
        }
        for (int a : leaf.phi_minus) {
          if (rows[k][a]) fixes.emplace_back(a, 0);
        }
        shuffle_fixes(fixes);
        for (auto [a, val] : fixes) {
          if (literal_bits(k, a, val, bits)) {
            apply_mutation(k, bits, labels[k], undo);
            return true;
          }
        }
      }
      return false;
    }

    // Surplus: pull a row out of (t, v, c).
    for (int attempt = 0; attempt < 8; ++attempt) {
      const int k = pick_mutable_row();
      if (k < 0) return false;
      if (row_leaf[k][t] != static_cast<int>(v) || labels[k] != c) continue;
      if (ms.allow_resize &&
          static_cast<int>(rows.size()) > p.n_interval.n_min &&
          rng.uniform_int(4) == 0) {
        remove_row(k, undo);
        return true;
      }
      if (ms.can_relabel && rng.uniform_int(2) == 0) {
        if (try_relabel(undo, k)) return true;
      }
      // Break one predicate literal so the row routes elsewhere.
      std::vector<std::pair<int, std::uint8_t>> breaks;
      std::vector<std::pair<int, std::uint8_t>> bits;
      for (int a : leaf.phi_plus) breaks.emplace_back(a, 0);
      for (int a : leaf.phi_minus) breaks.emplace_back(a, 1);
      shuffle_fixes(breaks);
      for (auto [a, val] : breaks) {
        if (literal_bits(k, a, val, bits)) {
          apply_mutation(k, bits, labels[k], undo);
          return true;
        }
      }
    }
    return false;
  }

  void shuffle_fixes(std::vector<std::pair<int, std::uint8_t>>& fixes) {
    for (std::size_t i = fixes.size(); i > 1; --i) {
      std::swap(fixes[i - 1], fixes[rng.uniform_int(i)]);
    }
  }

  bool propose(Undo& undo) {
    if (rng.uniform_int(2) == 0 && try_guided(undo)) return true;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const std::uint64_t kind = rng.uniform_int(ms.allow_resize ? 10 : 8);
      bool ok = false;
      if (kind < 4) {
        ok = try_flip(undo);
      } else if (kind < 6) {
        ok = try_swap(undo);
      } else if (kind < 8) {
        ok = try_relabel(undo);
      } else if (kind == 8) {
        ok = try_add(undo);
      } else {
        ok = try_remove(undo);
      }
      if (ok) return true;
    }
    return false;
  }

  // --- annealing ----------------------------------------------------------

  void refresh_exact_score() {
    soft_sum = 0;
    violations = 0;
    for (int i = 0; i < p.num_cells; ++i) {
      const long long delta = p.noisy_counts[i] - counts[i];
      soft_sum += cell_score(delta);
      violations += std::llabs(delta) > p.noise.gamma;
    }
    if (p.threat == ThreatModel::informed) {
      reg_dist = 0;
      for (std::size_t k = ms.first_mutable_row; k < rows.size(); ++k) {
        for (int j = 0; j < p.num_features; ++j) {
          reg_dist += bit_cost(j, rows[k][j]);
        }
      }
    }
  }

  void maybe_update_incumbent() {
    const bool hard_now = violations == 0;
    const double obj = composite();
    const bool better = !inc_valid || (hard_now && !inc_hard) ||
                        (hard_now == inc_hard && obj > inc_obj);
    if (!better) return;
    inc_valid = true;
    inc_hard = hard_now;
    inc_obj = obj;
    inc_rows = rows;
    inc_labels = labels;
    const double now = wall();
    last_improve_wall = now;
    if (hard_now && first_feasible < 0) first_feasible = now;
    trace.push_back({now, obj, hard_now});
  }

  // Returns false when the whole solve should stop.
  bool run_restart(int restart, double deadline, long long move_quota) {
    rng = Rng(Rng::derive(opt.seed, {0x51a77e21ULL,
                                     static_cast<std::uint64_t>(worker_index),
                                     static_cast<std::uint64_t>(restart)}));
    greedy_init();
    refresh_exact_score();
    maybe_update_incumbent();
    rebuild_guided_lists();

    double temperature = opt.initial_temperature;
    const long long quota_end = moves + move_quota;
    int batches = 0;
    while (true) {
      for (int i = 0; i < opt.batch_moves; ++i) {
        Undo undo;
        const double before = composite();
        if (!propose(undo)) return true;  // move space exhausted
        ++moves;
        const double after = composite();
        const double gain = after - before;
        if (gain < 0 &&
            rng.uniform_double() >= std::exp(gain / temperature)) {
          undo_move(undo);
        } else {
          maybe_update_incumbent();
        }
      }
      temperature = std::max(temperature * opt.cooling, 1e-6);
      rebuild_guided_lists();
      if (++batches % 512 == 0) refresh_exact_score();

      if (opt.max_moves >= 0) {
        if (moves >= quota_end) return true;
      } else {
        const double now = wall();
        if (now >= deadline) return true;
        if (opt.stall_stop_seconds > 0 && inc_hard &&
            now - last_improve_wall > opt.stall_stop_seconds) {
          return false;
        }
        if (now >= opt.time_budget_seconds) return false;
      }
    }
  }

  void run() {
    const int restarts = std::max(opt.restarts, 1);
    for (int r = 0; r < restarts; ++r) {
      double deadline = opt.time_budget_seconds;
      long long quota = std::numeric_limits<long long>::max();
      if (opt.max_moves >= 0) {
        quota = std::max<long long>(opt.max_moves / restarts, 1);
      } else {
        const double now = wall();
        const double remaining = opt.time_budget_seconds - now;
        if (remaining <= 0) break;
        deadline = now + remaining / (restarts - r);
      }
      if (!run_restart(r, deadline, quota)) break;
    }
  }
};

}  // namespace

AnytimeResult solve_anytime(const ReconstructionProblem& problem,
                            const AnytimeOptions& options) {
  if (options.time_budget_seconds <= 0 && options.max_moves < 0) {
    throw std::invalid_argument("anytime solver needs a positive budget");
  }
  const MoveSpace space = build_move_space(problem);
  const Clock::time_point t0 = Clock::now();

  const int threads = std::max(options.threads, 1);
  std::vector<std::unique_ptr<Worker>> workers;
  workers.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    workers.push_back(std::make_unique<Worker>(problem, space, options, w, t0));
  }
  if (threads == 1) {
    workers[0]->run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (auto& worker : workers) {
      pool.emplace_back([&worker] { worker->run(); });
    }
    for (auto& th : pool) th.join();
  }

  int winner = 0;
  for (int w = 1; w < threads; ++w) {
    const Worker& a = *workers[w];
    const Worker& b = *workers[winner];
    const bool better = (a.inc_hard && !b.inc_hard) ||
                        (a.inc_hard == b.inc_hard && a.inc_obj > b.inc_obj);
    if (better) winner = w;
  }

  Worker& best = *workers[winner];
  AnytimeResult result;
  result.trace = std::move(best.trace);
  result.found_hard_feasible = best.inc_hard;
  result.time_to_first_feasible = best.first_feasible;
  result.soft_objective = best.inc_obj;
  for (const auto& worker : workers) result.moves += worker->moves;
  result.best = score_solution(problem, std::move(best.inc_rows),
                               std::move(best.inc_labels));
  return result;
}

}  // namespace dpaudit
