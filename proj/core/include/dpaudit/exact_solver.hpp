#pragma once

#include "dpaudit/reconstruction.hpp"

namespace dpaudit {

struct ExactLimits {
  // Upper bound on (#patterns x #classes)^N per N~ value; enumeration
  // refuses to start above it.
  double ceiling = 1e7;
};

enum class ExactStatus {
  optimal,          // best is a certified maximum-likelihood solution
  infeasible_hard,  // every assignment leaves some |delta| > gamma
};

struct ExactResult {
  CandidateSolution best;
  ExactStatus status = ExactStatus::optimal;
  long long evaluated = 0;  // scored assignments
};

// Brute-force oracle. Full and unknown-N modes enumerate unordered multisets
// of (pattern, label) rows (the objective is exchangeable); partial and
// informed modes pin per-row candidates and enumerate sequences. Ties break
// to the lexicographically smallest canonical dataset. Throws when the
// search-space bound exceeds limits.ceiling.
ExactResult solve_exact(const ReconstructionProblem& problem,
                        const ExactLimits& limits = {});

}  // namespace dpaudit
