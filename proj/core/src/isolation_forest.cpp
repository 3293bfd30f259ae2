#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpaudit/isolation_forest.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {

namespace {

// Average unsuccessful-search path length in a BST of n nodes, the standard
// normalizer: c(1) = 0, c(2) = 1, else 2 H(n-1) - 2 (n-1) / n.
double average_path_length(int n) {
  if (n <= 1) return 0;
  if (n == 2) return 1;
  double harmonic = 0;
  for (int i = 1; i < n; ++i) harmonic += 1.0 / i;
  return 2 * harmonic - 2.0 * (n - 1) / n;
}

struct IsoNode {
  int attribute = -1;  // -1 marks an external node
  int left = -1;
  int right = -1;
  int size = 0;        // external node sample size
  int depth = 0;
};

struct IsoTree {
  std::vector<IsoNode> nodes;
};

// Builds one tree on `sample` (row indices). Binary attributes make the
// uniform threshold in (min, max) route zeros left and ones right, so only
// the attribute index is kept.
IsoTree build_tree(const BinaryDataset& data, std::vector<int> sample,
                   int height_limit, Rng& rng) {
  IsoTree tree;
  struct Frame {
    std::vector<int> rows;
    int depth;
    int slot;
  };
  std::vector<Frame> work;
  tree.nodes.emplace_back();
  work.push_back({std::move(sample), 0, 0});
  const int m = data.m();
  std::vector<int> eligible;
  while (!work.empty()) {
    Frame frame = std::move(work.back());
    work.pop_back();
    IsoNode node;
    node.depth = frame.depth;
    node.size = static_cast<int>(frame.rows.size());
    eligible.clear();
    if (frame.depth < height_limit && frame.rows.size() > 1) {
      for (int j = 0; j < m; ++j) {
        const std::uint8_t first = data.rows[frame.rows[0]][j];
        for (int r : frame.rows) {
          if (data.rows[r][j] != first) {
            eligible.push_back(j);
            break;
          }
        }
      }
    }
    if (eligible.empty()) {
      tree.nodes[frame.slot] = node;
      continue;
    }
    node.attribute = eligible[rng.uniform_int(eligible.size())];
    std::vector<int> left, right;
    for (int r : frame.rows) {
      (data.rows[r][node.attribute] ? right : left).push_back(r);
    }
    node.left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    node.right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[frame.slot] = node;
    work.push_back({std::move(left), frame.depth + 1, node.left});
    work.push_back({std::move(right), frame.depth + 1, node.right});
  }
  return tree;
}

double path_length(const IsoTree& tree, const std::vector<std::uint8_t>& row) {
  int at = 0;
  while (tree.nodes[at].attribute >= 0) {
    const IsoNode& node = tree.nodes[at];
    at = row[node.attribute] ? node.right : node.left;
  }
  const IsoNode& leaf = tree.nodes[at];
  return leaf.depth + average_path_length(leaf.size);
}

}  // namespace

std::vector<double> isolation_scores(const BinaryDataset& data,
                                     const IsolationOptions& options) {
  if (data.n() == 0) return {};
  if (options.num_trees <= 0 || options.subsample <= 0) {
    throw std::invalid_argument("isolation_scores: bad options");
  }
  const int n = data.n();
  const int psi = std::min(options.subsample, n);
  const int height_limit =
      static_cast<int>(std::ceil(std::log2(std::max(psi, 2))));
  const double normalizer = std::max(average_path_length(psi), 1e-12);

  // Accumulating normalized path lengths keeps the degenerate case exact:
  // when every tree yields the normalizer itself (no isolation signal), each
  // ratio is exactly 1 and the score lands on 0.5 with no rounding drift.
  std::vector<double> ratio_sum(n, 0);
  std::vector<int> pool(n);
  for (int t = 0; t < options.num_trees; ++t) {
    Rng rng(Rng::derive(options.seed,
                        {0x15b8c201ULL, static_cast<std::uint64_t>(t)}));
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < psi; ++i) {
      int j = i + static_cast<int>(rng.uniform_int(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    IsoTree tree =
        build_tree(data, std::vector<int>(pool.begin(), pool.begin() + psi),
                   height_limit, rng);
    for (int i = 0; i < n; ++i) {
      ratio_sum[i] += path_length(tree, data.rows[i]) / normalizer;
    }
  }

  std::vector<double> scores(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = std::exp2(-ratio_sum[i] / options.num_trees);
  }
  return scores;
}

InlierSplit split_inliers_outliers(const std::vector<double>& scores,
                                   double threshold) {
  InlierSplit split;
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    (scores[i] > threshold ? split.outliers : split.inliers).push_back(i);
  }
  return split;
}

}  // namespace dpaudit
