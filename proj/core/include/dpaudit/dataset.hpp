#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dpaudit {

// Column indices that jointly one-hot encode one original categorical
// feature; exactly one of them is 1 in every valid row.
using OneHotGroup = std::vector<int>;

struct BinaryDataset {
  std::vector<std::vector<std::uint8_t>> rows;  // N x M, entries in {0,1}
  std::vector<int> labels;                      // class ids in [0, num_classes)
  int num_classes = 2;
  std::vector<OneHotGroup> groups;
  std::vector<std::string> feature_names;  // optional; empty or size M

  int n() const { return static_cast<int>(rows.size()); }
  int m() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }

  // Throws std::invalid_argument on any invariant violation: ragged rows,
  // non-binary cells, labels out of range, one-hot groups not summing to 1.
  void validate() const;
};

// Per-column treatment for load_csv. Columns not listed must hold 0/1 values.
struct ColumnSpec {
  enum class Kind { categorical, continuous };
  std::string column;
  Kind kind = Kind::categorical;
  std::vector<double> bin_edges;  // continuous: value in bin i when
                                  // edges[i-1] <= value < edges[i]
};

// General binarization: plain binary columns pass through, categorical
// columns one-hot expand in first-seen level order, continuous columns are
// binned by the supplied edges then one-hot expanded. The label column must
// hold integer class ids. Expanded columns keep the original column order.
BinaryDataset load_csv(const std::string& path, const std::string& label_column,
                       const std::vector<ColumnSpec>& declared);

struct TrainHeldoutSplit {
  BinaryDataset train;
  BinaryDataset heldout;  // complement; the privacy-leak sampling universe
};

// Uniform sample of n rows without replacement; pure in (dataset, n, seed).
TrainHeldoutSplit sample_training_set(const BinaryDataset& dataset, int n,
                                      std::uint64_t seed);

// Two-class rows from a fixed product-of-Bernoullis distribution per class;
// group_layout lists one-hot group sizes occupying the first sum(sizes)
// columns, remaining columns are free Bernoulli attributes.
BinaryDataset generate_synthetic(int m_features, int n_rows,
                                 double class_balance,
                                 const std::vector<int>& group_layout,
                                 std::uint64_t seed);

}  // namespace dpaudit
