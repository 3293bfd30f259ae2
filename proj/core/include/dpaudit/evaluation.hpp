#pragma once

#include <cstdint>
#include <vector>

#include "dpaudit/dataset.hpp"

namespace dpaudit {

struct MatchingResult {
  std::vector<int> assignment;  // reconstructed index -> original index
  long long total_cost = 0;
  std::vector<int> per_pair_costs;
};

// cost[i][j] = Manhattan distance between reconstructed row i and original
// row j; labels are excluded from the distance.
std::vector<std::vector<int>> manhattan_cost_matrix(const BinaryDataset& rec,
                                                    const BinaryDataset& orig);

// Optimal linear sum assignment via shortest augmenting paths (O(n^3)).
MatchingResult min_cost_matching(const std::vector<std::vector<int>>& cost);

// min-cost matching total / (N * M). Row counts must already agree; apply
// align_unknown_n first otherwise.
double reconstruction_error(const BinaryDataset& rec, const BinaryDataset& orig);

// N~ > n_true: uniform subsample; N~ < n_true: pad with uniform duplicates.
BinaryDataset align_unknown_n(const BinaryDataset& rec, int n_true,
                              std::uint64_t seed);

// Mean reconstruction_error of `runs` uniform one-hot-consistent guesses.
double random_baseline(const BinaryDataset& original,
                       const std::vector<OneHotGroup>& groups, int runs,
                       std::uint64_t seed);

// Per-coordinate majority (ties -> 1), repaired to the one-hot-valid row
// nearest in average Manhattan distance; exact ties break to the lowest index.
std::vector<std::uint8_t> majority_baseline(const BinaryDataset& known_rows);

struct PerfectStats {
  double proportion_perfect = 0;       // share of matched pairs with cost 0
  double worst_individual_error = 0;   // max per-pair cost / M
};

PerfectStats perfect_reconstruction_stats(const MatchingResult& matching,
                                          int m_features);

double normal_cdf(double z);

struct LeakResult {
  double cdf = 0;
  double mean = 0;
  double stddev = 0;
  bool degenerate = false;  // zero sample std
};

// Errors of `samples` N-row draws from the held-out pool against the
// reconstruction, fitted as a normal (unbiased std); returns Phi at the
// actual error against the original training set.
LeakResult privacy_leak_cdf(const BinaryDataset& reconstructed,
                            const BinaryDataset& original,
                            const BinaryDataset& heldout_pool, int samples,
                            std::uint64_t seed);

}  // namespace dpaudit
