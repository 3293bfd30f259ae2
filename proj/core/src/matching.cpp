#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dpaudit/evaluation.hpp"

namespace dpaudit {

std::vector<std::vector<int>> manhattan_cost_matrix(const BinaryDataset& rec,
                                                    const BinaryDataset& orig) {
  if (rec.m() != orig.m()) {
    throw std::invalid_argument("cost matrix: feature width mismatch");
  }
  const int n = rec.n();
  const int k = orig.n();
  std::vector<std::vector<int>> cost(n, std::vector<int>(k, 0));
  for (int i = 0; i < n; ++i) {
    const auto& a = rec.rows[i];
    for (int j = 0; j < k; ++j) {
      const auto& b = orig.rows[j];
      int d = 0;
      for (std::size_t f = 0; f < a.size(); ++f) d += a[f] != b[f];
      cost[i][j] = d;
    }
  }
  return cost;
}

// Jonker-Volgenant style shortest augmenting path assignment. Rows and
// columns must be the same size.
MatchingResult min_cost_matching(const std::vector<std::vector<int>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("min_cost_matching: matrix must be square");
    }
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // 1-indexed potentials; p[j] = row matched to column j.
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  MatchingResult result;
  result.assignment.assign(n, -1);
  result.per_pair_costs.assign(n, 0);
  for (int j = 1; j <= n; ++j) {
    if (p[j] == 0) continue;
    result.assignment[p[j] - 1] = j - 1;
  }
  for (int i = 0; i < n; ++i) {
    result.per_pair_costs[i] = cost[i][result.assignment[i]];
    result.total_cost += result.per_pair_costs[i];
  }
  return result;
}

}  // namespace dpaudit
