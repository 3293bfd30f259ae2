#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dpaudit/evaluation.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {

double reconstruction_error(const BinaryDataset& rec,
                            const BinaryDataset& orig) {
  if (rec.n() != orig.n()) {
    throw std::invalid_argument(
        "reconstruction_error: row counts differ; align first");
  }
  if (rec.n() == 0) return 0;
  auto cost = manhattan_cost_matrix(rec, orig);
  auto match = min_cost_matching(cost);
  return static_cast<double>(match.total_cost) /
         (static_cast<double>(orig.n()) * orig.m());
}

BinaryDataset align_unknown_n(const BinaryDataset& rec, int n_true,
                              std::uint64_t seed) {
  BinaryDataset out = rec;
  Rng rng(Rng::derive(seed, {0x9c1f25bbULL}));
  if (rec.n() > n_true) {
    // Partial Fisher-Yates: keep a uniform subsample, original order.
    std::vector<int> idx(rec.n());
    for (int i = 0; i < rec.n(); ++i) idx[i] = i;
    for (int i = 0; i < n_true; ++i) {
      int j = i + static_cast<int>(rng.uniform_int(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(n_true);
    std::sort(idx.begin(), idx.end());
    out.rows.clear();
    out.labels.clear();
    for (int i : idx) {
      out.rows.push_back(rec.rows[i]);
      out.labels.push_back(rec.labels[i]);
    }
  } else if (rec.n() < n_true) {
    if (rec.n() == 0) {
      throw std::invalid_argument("align_unknown_n: cannot pad empty set");
    }
    while (out.n() < n_true) {
      int j = static_cast<int>(rng.uniform_int(rec.n()));
      out.rows.push_back(rec.rows[j]);
      out.labels.push_back(rec.labels[j]);
    }
  }
  return out;
}

namespace {

// One row drawn uniformly from the one-hot-consistent domain: free
// coordinates are fair coins, each group gets a single uniformly placed one.
std::vector<std::uint8_t> random_valid_row(int m,
                                           const std::vector<OneHotGroup>& groups,
                                           const std::vector<char>& grouped,
                                           Rng& rng) {
  std::vector<std::uint8_t> row(m, 0);
  for (int j = 0; j < m; ++j) {
    if (!grouped[j]) row[j] = static_cast<std::uint8_t>(rng.uniform_int(2));
  }
  for (const auto& g : groups) {
    row[g[static_cast<std::size_t>(rng.uniform_int(g.size()))]] = 1;
  }
  return row;
}

}  // namespace

double random_baseline(const BinaryDataset& original,
                       const std::vector<OneHotGroup>& groups, int runs,
                       std::uint64_t seed) {
  if (runs <= 0) throw std::invalid_argument("random_baseline: runs must be > 0");
  const int m = original.m();
  std::vector<char> grouped(m, 0);
  for (const auto& g : groups) {
    for (int j : g) grouped[j] = 1;
  }
  double total = 0;
  for (int r = 0; r < runs; ++r) {
    Rng rng(Rng::derive(seed, {0x3d6a11c4ULL, static_cast<std::uint64_t>(r)}));
    BinaryDataset guess = original;
    for (auto& row : guess.rows) row = random_valid_row(m, groups, grouped, rng);
    total += reconstruction_error(guess, original);
  }
  return total / runs;
}

std::vector<std::uint8_t> majority_baseline(const BinaryDataset& known_rows) {
  if (known_rows.n() == 0) {
    throw std::invalid_argument("majority_baseline: empty dataset");
  }
  const int n = known_rows.n();
  const int m = known_rows.m();
  std::vector<int> ones(m, 0);
  for (const auto& row : known_rows.rows) {
    for (int j = 0; j < m; ++j) ones[j] += row[j];
  }
  std::vector<std::uint8_t> out(m, 0);
  // Free coordinates: majority vote, ties go to 1. Both choices are
  // matching-cost optimal at a tie; fixing one keeps the output deterministic.
  for (int j = 0; j < m; ++j) out[j] = 2 * ones[j] >= n;
  // Groups: place the single one at the member with the most votes, lowest
  // index on ties, so the row stays one-hot valid.
  for (const auto& g : known_rows.groups) {
    int best = g[0];
    for (int j : g) {
      out[j] = 0;
      if (ones[j] > ones[best]) best = j;
    }
    out[best] = 1;
  }
  return out;
}

PerfectStats perfect_reconstruction_stats(const MatchingResult& matching,
                                          int m_features) {
  PerfectStats stats;
  if (matching.per_pair_costs.empty() || m_features <= 0) return stats;
  int perfect = 0;
  int worst = 0;
  for (int c : matching.per_pair_costs) {
    perfect += c == 0;
    worst = std::max(worst, c);
  }
  stats.proportion_perfect =
      static_cast<double>(perfect) / matching.per_pair_costs.size();
  stats.worst_individual_error = static_cast<double>(worst) / m_features;
  return stats;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

LeakResult privacy_leak_cdf(const BinaryDataset& reconstructed,
                            const BinaryDataset& original,
                            const BinaryDataset& heldout_pool, int samples,
                            std::uint64_t seed) {
  if (samples < 2) {
    throw std::invalid_argument("privacy_leak_cdf: need at least 2 samples");
  }
  const int n = original.n();
  if (heldout_pool.n() < n) {
    throw std::invalid_argument("privacy_leak_cdf: held-out pool too small");
  }
  const double actual = reconstruction_error(reconstructed, original);

  std::vector<double> errors(samples);
  for (int s = 0; s < samples; ++s) {
    Rng rng(Rng::derive(seed, {0x7be4d902ULL, static_cast<std::uint64_t>(s)}));
    BinaryDataset draw = original;
    draw.rows.clear();
    draw.labels.clear();
    // Partial Fisher-Yates over the pool.
    std::vector<int> idx(heldout_pool.n());
    for (int i = 0; i < heldout_pool.n(); ++i) idx[i] = i;
    for (int i = 0; i < n; ++i) {
      int j = i + static_cast<int>(rng.uniform_int(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    for (int i = 0; i < n; ++i) {
      draw.rows.push_back(heldout_pool.rows[idx[i]]);
      draw.labels.push_back(heldout_pool.labels[idx[i]]);
    }
    errors[s] = reconstruction_error(reconstructed, draw);
  }

  LeakResult result;
  double mean = 0;
  for (double e : errors) mean += e;
  mean /= samples;
  double var = 0;
  for (double e : errors) var += (e - mean) * (e - mean);
  var /= samples - 1;  // unbiased
  result.mean = mean;
  result.stddev = std::sqrt(var);
  if (result.stddev == 0) {
    result.degenerate = true;
    result.cdf = actual < mean ? 0.0 : (actual > mean ? 1.0 : 0.5);
    return result;
  }
  result.cdf = normal_cdf((actual - mean) / result.stddev);
  return result;
}

}  // namespace dpaudit
