#pragma once

#include <cstdint>
#include <vector>

#include "dpaudit/reconstruction.hpp"

namespace dpaudit {

struct AnytimeOptions {
  double time_budget_seconds = 120;
  std::uint64_t seed = 0;
  // Independent portfolio workers; 1 is bit-deterministic up to the
  // termination point.
  int threads = 1;
  double cooling = 0.999;  // geometric temperature factor per batch
  int restarts = 8;
  int batch_moves = 64;
  double initial_temperature = 2.0;
  // Stop once a hard-feasible solution exists and the incumbent has not
  // improved for this long; <= 0 disables the early stop.
  double stall_stop_seconds = -1;
  // When >= 0, terminate on a move count instead of the wall clock, making
  // the run fully deterministic.
  long long max_moves = -1;
};

struct TracePoint {
  double wall_seconds = 0;
  double objective = 0;
  bool hard_feasible = false;
};

struct AnytimeResult {
  CandidateSolution best;
  std::vector<TracePoint> trace;  // appended at each incumbent improvement
  bool found_hard_feasible = false;
  double time_to_first_feasible = -1;  // seconds; -1 when never reached
  // Composite value of the returned solution under the soft tail, the
  // score the search itself maximized.
  double soft_objective = 0;
  long long moves = 0;
};

// Simulated annealing over candidate datasets: greedy construction, then
// flip / one-hot swap / relabel moves (plus add-or-remove-row when N is a
// decision variable), guided toward surplus and deficit cells, scored
// incrementally under the soft tail. The best hard-feasible solution wins;
// without one the best soft solution is returned flagged infeasible.
AnytimeResult solve_anytime(const ReconstructionProblem& problem,
                            const AnytimeOptions& options = {});

}  // namespace dpaudit
