#pragma once

#include <string>

#include "dpaudit/dataset.hpp"
#include "dpaudit/forest.hpp"

namespace dpaudit {

// Dataset record {n, m, num_classes, groups, rows, labels}; feature_names is
// carried when present and tolerated on input.
std::string dataset_to_json(const BinaryDataset& dataset);
BinaryDataset dataset_from_json(const std::string& text);

// Forest record {num_trees, depth, epsilon_total, num_classes, num_features,
// trees: [{nodes: [{kind, attribute?, left?, right?, true_counts?,
// noisy_counts?}]}]}. epsilon_total serializes as the string "inf" when the
// no-noise sentinel is active. attacker_view strips true counts and the
// training-set size.
std::string forest_to_json(const Forest& forest, bool attacker_view);
Forest forest_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dpaudit
