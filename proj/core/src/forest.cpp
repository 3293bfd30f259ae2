#include "dpaudit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpaudit {
namespace {

struct Builder {
  int m;
  const std::vector<int>* group_of;  // attribute -> group index or -1
  const std::vector<OneHotGroup>* groups;
  Rng* rng;
  DecisionTree* tree;

  int grow(int remaining, std::vector<int>& phi_plus, std::vector<int>& phi_minus) {
    std::vector<int> eligible;
    if (remaining > 0) {
      for (int a = 0; a < m; ++a) {
        if (std::find(phi_plus.begin(), phi_plus.end(), a) != phi_plus.end() ||
            std::find(phi_minus.begin(), phi_minus.end(), a) != phi_minus.end()) {
          continue;
        }
        const int g = (*group_of)[static_cast<std::size_t>(a)];
        if (g >= 0) {
          // A sibling already forced to 1 decides the whole group.
          bool sibling_set = false;
          for (int s : (*groups)[static_cast<std::size_t>(g)]) {
            if (s != a &&
                std::find(phi_plus.begin(), phi_plus.end(), s) != phi_plus.end()) {
              sibling_set = true;
              break;
            }
          }
          if (sibling_set) continue;
        }
        eligible.push_back(a);
      }
    }
    const int index = static_cast<int>(tree->nodes.size());
    tree->nodes.emplace_back();
    if (remaining == 0 || eligible.empty()) {
      tree->nodes[static_cast<std::size_t>(index)].kind = TreeNode::Kind::leaf;
      LeafPredicate leaf;
      leaf.node = index;
      leaf.phi_plus = phi_plus;
      leaf.phi_minus = phi_minus;
      tree->leaves.push_back(std::move(leaf));
      return index;
    }
    const int attr = eligible[rng->uniform_int(eligible.size())];
    tree->nodes[static_cast<std::size_t>(index)].kind = TreeNode::Kind::internal;
    tree->nodes[static_cast<std::size_t>(index)].attribute = attr;
    phi_plus.push_back(attr);
    const int left = grow(remaining - 1, phi_plus, phi_minus);
    phi_plus.pop_back();
    phi_minus.push_back(attr);
    const int right = grow(remaining - 1, phi_plus, phi_minus);
    phi_minus.pop_back();
    tree->nodes[static_cast<std::size_t>(index)].left = left;
    tree->nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }
};

}  // namespace

void DecisionTree::rebuild_leaf_index() {
  leaf_of_node.assign(nodes.size(), -1);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    leaf_of_node[static_cast<std::size_t>(leaves[i].node)] = static_cast<int>(i);
  }
}

DecisionTree build_random_tree(int m_features,
                               const std::vector<OneHotGroup>& groups,
                               int depth, Rng& rng) {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (m_features < 1) throw std::invalid_argument("need at least one attribute");
  std::vector<int> group_of(static_cast<std::size_t>(m_features), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int a : groups[g]) group_of[static_cast<std::size_t>(a)] = static_cast<int>(g);
  }
  DecisionTree tree;
  tree.depth = depth;
  Builder builder{m_features, &group_of, &groups, &rng, &tree};
  std::vector<int> plus, minus;
  builder.grow(depth, plus, minus);
  tree.rebuild_leaf_index();
  return tree;
}

int route_example(const DecisionTree& tree, const std::vector<std::uint8_t>& row) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].kind == TreeNode::Kind::internal) {
    const auto& n = tree.nodes[static_cast<std::size_t>(node)];
    node = row[static_cast<std::size_t>(n.attribute)] == 1 ? n.left : n.right;
  }
  return tree.leaf_of_node[static_cast<std::size_t>(node)];
}

void compute_true_counts(DecisionTree& tree, const BinaryDataset& dataset) {
  for (auto& leaf : tree.leaves) {
    tree.nodes[static_cast<std::size_t>(leaf.node)].true_counts.assign(
        static_cast<std::size_t>(dataset.num_classes), 0);
  }
  for (int k = 0; k < dataset.n(); ++k) {
    const int leaf = route_example(tree, dataset.rows[static_cast<std::size_t>(k)]);
    const int node = tree.leaves[static_cast<std::size_t>(leaf)].node;
    tree.nodes[static_cast<std::size_t>(node)]
        .true_counts[static_cast<std::size_t>(dataset.labels[static_cast<std::size_t>(k)])]++;
  }
}

long long laplace_int_noise(double epsilon_v, Rng& rng) {
  if (!(epsilon_v > 0)) throw std::invalid_argument("epsilon_v must be > 0");
  if (std::isinf(epsilon_v)) return 0;
  return rng.laplace_int(epsilon_v);
}

Forest train_dp_forest(const BinaryDataset& dataset, int num_trees, int depth,
                       double epsilon_total, std::uint64_t seed) {
  if (num_trees < 1) throw std::invalid_argument("num_trees must be >= 1");
  if (!(epsilon_total > 0)) {
    throw std::invalid_argument("epsilon_total must be > 0 or infinity");
  }
  dataset.validate();
  Forest forest;
  forest.epsilon_total = epsilon_total;
  forest.num_classes = dataset.num_classes;
  forest.num_features = dataset.m();
  forest.n_train_true = dataset.n();
  const double epsilon_v = epsilon_total / static_cast<double>(num_trees);
  const bool no_noise = std::isinf(epsilon_total);
  for (int t = 0; t < num_trees; ++t) {
    Rng rng(Rng::derive(seed, {0x7f0a6b2d, static_cast<std::uint64_t>(t)}));
    DecisionTree tree =
        build_random_tree(dataset.m(), dataset.groups, depth, rng);
    compute_true_counts(tree, dataset);
    for (auto& leaf : tree.leaves) {
      auto& node = tree.nodes[static_cast<std::size_t>(leaf.node)];
      node.noisy_counts.resize(node.true_counts.size());
      for (std::size_t c = 0; c < node.true_counts.size(); ++c) {
        node.noisy_counts[c] =
            node.true_counts[c] + (no_noise ? 0 : laplace_int_noise(epsilon_v, rng));
      }
    }
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

Prediction predict_soft_voting(const Forest& forest,
                               const std::vector<std::uint8_t>& row,
                               CountMode mode) {
  const auto num_classes = static_cast<std::size_t>(forest.num_classes);
  std::vector<double> sum(num_classes, 0.0);
  for (const auto& tree : forest.trees) {
    const int leaf = route_example(tree, row);
    const auto& node = tree.nodes[static_cast<std::size_t>(tree.leaves[static_cast<std::size_t>(leaf)].node)];
    const auto& counts =
        mode == CountMode::true_counts ? node.true_counts : node.noisy_counts;
    long long total = 0;
    for (long long c : counts) total += c;
    if (total <= 0) {
      for (auto& s : sum) s += 1.0 / static_cast<double>(num_classes);
      continue;
    }
    long long clamped_total = 0;
    for (long long c : counts) clamped_total += std::max<long long>(c, 0);
    for (std::size_t c = 0; c < num_classes; ++c) {
      sum[c] += static_cast<double>(std::max<long long>(counts[c], 0)) /
                static_cast<double>(clamped_total);
    }
  }
  Prediction pred;
  pred.probabilities.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    pred.probabilities[c] = sum[c] / static_cast<double>(forest.trees.size());
  }
  for (std::size_t c = 1; c < num_classes; ++c) {
    if (pred.probabilities[c] > pred.probabilities[static_cast<std::size_t>(pred.class_id)]) {
      pred.class_id = static_cast<int>(c);
    }
  }
  return pred;
}

double accuracy(const Forest& forest, const BinaryDataset& dataset,
                CountMode mode) {
  if (dataset.n() == 0) throw std::invalid_argument("empty dataset");
  int correct = 0;
  for (int k = 0; k < dataset.n(); ++k) {
    const auto pred = predict_soft_voting(forest, dataset.rows[static_cast<std::size_t>(k)], mode);
    if (pred.class_id == dataset.labels[static_cast<std::size_t>(k)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.n());
}

}  // namespace dpaudit
