#pragma once

#include <cstdint>
#include <vector>

#include "dpaudit/dataset.hpp"

namespace dpaudit {

struct IsolationOptions {
  int num_trees = 100;
  int subsample = 256;
  std::uint64_t seed = 0;
};

// Anomaly scores s(x) = 2^(-E[h(x)] / c(n)) in (0, 1]; higher is more
// anomalous. Trees split on uniformly random attributes with uniformly
// random thresholds inside the node's value range.
std::vector<double> isolation_scores(const BinaryDataset& data,
                                     const IsolationOptions& options);

struct InlierSplit {
  std::vector<int> inliers;
  std::vector<int> outliers;
};

// score > threshold -> outlier (strict). With every row identical, expected
// path lengths equal c(n), every score is exactly 0.5, and the default cut
// flags nothing.
InlierSplit split_inliers_outliers(const std::vector<double>& scores,
                                   double threshold = 0.5);

}  // namespace dpaudit
