#pragma once

#include <cstdint>
#include <vector>

#include "dpaudit/dataset.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {

struct TreeNode {
  enum class Kind { internal, leaf };
  Kind kind = Kind::leaf;
  int attribute = -1;  // internal only; left child takes attribute value 1
  int left = -1;
  int right = -1;
  std::vector<long long> true_counts;   // leaf only, per class
  std::vector<long long> noisy_counts;  // leaf only, per class; may be negative
};

// Root-path predicate of one leaf: attributes forced to 1 resp. 0.
struct LeafPredicate {
  int node = -1;
  std::vector<int> phi_plus;
  std::vector<int> phi_minus;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int depth = 0;
  std::vector<LeafPredicate> leaves;   // depth-first order
  std::vector<int> leaf_of_node;       // node index -> leaf index, -1 internal

  int num_leaves() const { return static_cast<int>(leaves.size()); }
  void rebuild_leaf_index();
};

struct Forest {
  std::vector<DecisionTree> trees;
  double epsilon_total = 0;  // +infinity disables noise
  int num_classes = 0;
  int num_features = 0;
  int n_train_true = -1;  // bookkeeping; stripped from the attacker view

  int num_trees() const { return static_cast<int>(trees.size()); }
  // Derived from the stored total so the product relation is exact.
  double epsilon_per_leaf() const {
    return epsilon_total / static_cast<double>(trees.size());
  }
};

// Data-free random structure: split attributes drawn uniformly among those
// not fixed on the path, excluding one-hot siblings of a member already
// forced to 1. A branch with no eligible attribute terminates early in a leaf.
DecisionTree build_random_tree(int m_features,
                               const std::vector<OneHotGroup>& groups,
                               int depth, Rng& rng);

// Index into tree.leaves of the unique leaf consistent with the row.
int route_example(const DecisionTree& tree, const std::vector<std::uint8_t>& row);

void compute_true_counts(DecisionTree& tree, const BinaryDataset& dataset);

// Integer part (truncation toward zero) of a Laplace(1/epsilon_v) draw.
long long laplace_int_noise(double epsilon_v, Rng& rng);

// Structure built data-free; counts noised per (tree, leaf, class) with
// epsilon_v = epsilon_total/num_trees. The +infinity sentinel publishes true
// counts. Each tree consumes an independent stream derived from (seed, tree).
Forest train_dp_forest(const BinaryDataset& dataset, int num_trees, int depth,
                       double epsilon_total, std::uint64_t seed);

enum class CountMode { true_counts, noisy_counts };

struct Prediction {
  int class_id = 0;
  std::vector<double> probabilities;
};

// Soft voting: average of per-tree normalized leaf frequencies; a leaf whose
// selected counts total <= 0 contributes a uniform vector, otherwise negative
// entries are clamped to zero before normalizing. Argmax ties break low.
Prediction predict_soft_voting(const Forest& forest,
                               const std::vector<std::uint8_t>& row,
                               CountMode mode);

double accuracy(const Forest& forest, const BinaryDataset& dataset,
                CountMode mode);

}  // namespace dpaudit
