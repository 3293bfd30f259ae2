#include "dpaudit/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dpaudit {

using nlohmann::json;

std::string dataset_to_json(const BinaryDataset& dataset) {
  json j;
  j["n"] = dataset.n();
  j["m"] = dataset.m();
  j["num_classes"] = dataset.num_classes;
  j["groups"] = dataset.groups;
  j["rows"] = dataset.rows;
  j["labels"] = dataset.labels;
  if (!dataset.feature_names.empty()) j["feature_names"] = dataset.feature_names;
  return j.dump();
}

BinaryDataset dataset_from_json(const std::string& text) {
  const json j = json::parse(text);
  BinaryDataset d;
  d.num_classes = j.at("num_classes").get<int>();
  d.groups = j.at("groups").get<std::vector<OneHotGroup>>();
  d.rows = j.at("rows").get<std::vector<std::vector<std::uint8_t>>>();
  d.labels = j.at("labels").get<std::vector<int>>();
  if (j.contains("feature_names")) {
    d.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  }
  if (j.at("n").get<int>() != d.n() || j.at("m").get<int>() != d.m()) {
    throw std::invalid_argument("dataset header inconsistent with payload");
  }
  d.validate();
  return d;
}

namespace {

json epsilon_to_json(double epsilon) {
  if (std::isinf(epsilon)) return "inf";
  return epsilon;
}

double epsilon_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("epsilon_total must be a number or \"inf\"");
  }
  return j.get<double>();
}

}  // namespace

std::string forest_to_json(const Forest& forest, bool attacker_view) {
  json j;
  j["num_trees"] = forest.num_trees();
  j["depth"] = forest.trees.empty() ? 0 : forest.trees[0].depth;
  j["epsilon_total"] = epsilon_to_json(forest.epsilon_total);
  j["num_classes"] = forest.num_classes;
  j["num_features"] = forest.num_features;
  if (!attacker_view) j["n_train"] = forest.n_train_true;
  json trees = json::array();
  for (const auto& tree : forest.trees) {
    json nodes = json::array();
    for (const auto& node : tree.nodes) {
      json n;
      if (node.kind == TreeNode::Kind::internal) {
        n["kind"] = "internal";
        n["attribute"] = node.attribute;
        n["left"] = node.left;
        n["right"] = node.right;
      } else {
        n["kind"] = "leaf";
        if (!attacker_view && !node.true_counts.empty()) {
          n["true_counts"] = node.true_counts;
        }
        if (!node.noisy_counts.empty()) n["noisy_counts"] = node.noisy_counts;
      }
      nodes.push_back(std::move(n));
    }
    trees.push_back(json{{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

Forest forest_from_json(const std::string& text) {
  const json j = json::parse(text);
  Forest forest;
  forest.epsilon_total = epsilon_from_json(j.at("epsilon_total"));
  forest.num_classes = j.at("num_classes").get<int>();
  forest.num_features = j.at("num_features").get<int>();
  forest.n_train_true = j.value("n_train", -1);
  const int depth = j.at("depth").get<int>();
  for (const auto& jt : j.at("trees")) {
    DecisionTree tree;
    tree.depth = depth;
    for (const auto& jn : jt.at("nodes")) {
      TreeNode node;
      if (jn.at("kind").get<std::string>() == "internal") {
        node.kind = TreeNode::Kind::internal;
        node.attribute = jn.at("attribute").get<int>();
        node.left = jn.at("left").get<int>();
        node.right = jn.at("right").get<int>();
      } else {
        node.kind = TreeNode::Kind::leaf;
        if (jn.contains("true_counts")) {
          node.true_counts = jn.at("true_counts").get<std::vector<long long>>();
        }
        if (jn.contains("noisy_counts")) {
          node.noisy_counts = jn.at("noisy_counts").get<std::vector<long long>>();
        }
      }
      tree.nodes.push_back(std::move(node));
    }
    // Leaf predicates are structural; rebuild them by walking the tree.
    struct Frame {
      int node;
      std::vector<int> plus, minus;
    };
    // Depth-first, left before right, matching the builder's leaf order.
    std::vector<LeafPredicate> leaves;
    std::vector<Frame> work;
    work.push_back(Frame{0, {}, {}});
    while (!work.empty()) {
      Frame f = std::move(work.back());
      work.pop_back();
      const auto& node = tree.nodes[static_cast<std::size_t>(f.node)];
      if (node.kind == TreeNode::Kind::leaf) {
        LeafPredicate leaf;
        leaf.node = f.node;
        leaf.phi_plus = f.plus;
        leaf.phi_minus = f.minus;
        leaves.push_back(std::move(leaf));
        continue;
      }
      Frame right{node.right, f.plus, f.minus};
      right.minus.push_back(node.attribute);
      Frame left{node.left, std::move(f.plus), std::move(f.minus)};
      left.plus.push_back(node.attribute);
      work.push_back(std::move(right));
      work.push_back(std::move(left));
    }
    tree.leaves = std::move(leaves);
    tree.rebuild_leaf_index();
    forest.trees.push_back(std::move(tree));
  }
  return forest;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dpaudit
