#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpaudit/dataset.hpp"
#include "dpaudit/forest.hpp"
#include "dpaudit/noise_model.hpp"

namespace dpaudit {

// Attacker-visible model: structure and noisy counts, never true counts.
// One-hot groups travel out of band because the forest schema omits them.
struct ForestView {
  Forest forest;
  std::vector<OneHotGroup> groups;
};

ForestView attacker_view(const Forest& forest,
                         const std::vector<OneHotGroup>& groups);

// Parses a serialized forest and rejects any payload carrying true counts
// or the private training-set size.
ForestView forest_view_from_json(const std::string& text,
                                 const std::vector<OneHotGroup>& groups);

enum class ThreatModel { full, unknown_n, partial, informed };

struct NInterval {
  double n_star = 0;       // mean noisy per-tree total
  double sigma_zeta = 0;   // std of one tree's summed integer noise
  double t95 = 0;          // Student coefficient at |T|-1 dof
  int n_min = 1;
  int n_max = 1;
  bool normal_fallback = false;  // single tree: 1.96 stands in for t95
};

NInterval estimate_n_interval(const ForestView& view, const NoiseModel& noise);

// Per-row pinned attribute values: values[k][j] pins row k's column
// columns[j]. Rows beyond values.size() are unconstrained.
struct KnownColumns {
  std::vector<int> columns;
  std::vector<std::vector<std::uint8_t>> values;
};

struct ProblemOptions {
  int n_train = -1;            // required except in unknown_n mode
  KnownColumns known_columns;  // partial mode
  BinaryDataset known_rows;    // informed mode, labels included
  double alpha = -1;           // informed weight; <0 derives 20 * epsilon
};

struct ReconstructionProblem {
  ForestView view;
  NoiseModel noise;
  ThreatModel threat = ThreatModel::full;
  int num_classes = 0;
  int num_features = 0;

  // Flat cell indexing: cell_offset[t] + leaf_index * num_classes + c.
  std::vector<int> cell_offset;
  std::vector<long long> noisy_counts;
  int num_cells = 0;

  int n_exact = -1;      // known N (all modes but unknown_n)
  NInterval n_interval;  // unknown_n decision range for N~

  KnownColumns known_columns;
  BinaryDataset known_rows;
  double alpha = 0;

  int n_min() const;
  int n_max() const;
  int cell_index(int tree, int leaf, int label) const {
    return cell_offset[tree] + leaf * num_classes + label;
  }
};

ReconstructionProblem build_problem(const ForestView& view, ThreatModel threat,
                                    const ProblemOptions& options);

struct CandidateSolution {
  std::vector<std::vector<std::uint8_t>> rows;  // N~ reconstructed examples
  std::vector<int> labels;
  std::vector<long long> derived_counts;  // flat, routed from rows
  DeltaVector deltas;                     // noisy - derived, flat
  double objective = 0;             // composite score the solver maximized
  double log_likelihood_term = 0;   // raw hard-mode sum(log p_delta)
  double regularizer_term = 0;      // raw -sum of known-row L1 distances
  bool hard_feasible = false;
};

// Routes rows through every tree and fills counts, deltas, both raw terms,
// the composite objective, and hard feasibility.
CandidateSolution score_solution(const ReconstructionProblem& problem,
                                 std::vector<std::vector<std::uint8_t>> rows,
                                 std::vector<int> labels);

// Composite objective from raw terms: plain log-likelihood, except informed
// mode blends the distance regularizer and the likelihood, each rescaled by
// its own term count so alpha alone sets their balance.
double composite_objective(const ReconstructionProblem& problem,
                           double log_likelihood_raw, double regularizer_raw);

// Independent validity check. Re-derives counts from predicate sets (not the
// routing walk), confirms every derived invariant the solution claims, and
// enforces the threat model's pins. Returns an empty string when valid, else
// a description of the first violation.
std::string check_solution(const ReconstructionProblem& problem,
                           const CandidateSolution& solution);

// Rows+labels in canonical (lexicographic) order so equal multisets always
// produce identical output.
BinaryDataset extract_reconstruction(const CandidateSolution& solution,
                                     const std::vector<OneHotGroup>& groups);

// All attribute vectors consistent with the one-hot groups, in lexicographic
// order; the exact solver's pattern universe.
std::vector<std::vector<std::uint8_t>> enumerate_valid_patterns(
    int num_features, const std::vector<OneHotGroup>& groups);

}  // namespace dpaudit
