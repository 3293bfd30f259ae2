#pragma once

#include <vector>

namespace dpaudit {

// Noise guesses, one per (tree, leaf, class) cell in the owning forest's
// flat cell order: cell = tree_offset + leaf * num_classes + class.
using DeltaVector = std::vector<long long>;

enum class TailMode { hard, soft };

// Exact pmf of integer-cast Laplace(1/epsilon_v) noise together with the
// truncation bound gamma and precomputed log probabilities. epsilon_v may be
// +infinity (the no-noise sentinel), in which case all mass sits on 0.
struct NoiseModel {
  double epsilon_v = 0;
  int gamma = 0;
  bool gamma_widened = false;  // set if ceil(12/eps) had to be enlarged
  std::vector<double> log_table;  // log p_l for l = 0..gamma
  double tail_slope = 0;          // epsilon_v; soft-tail decay per unit

  static NoiseModel make(double epsilon_v);

  double pmf(long long l) const;
  double log_pmf(long long l) const;
  // Probability mass inside [-gamma, gamma]; closed form 1 - e^{-(g+1)eps}.
  double coverage() const;
  // Soft extension: log p_gamma - (|l|-gamma) * epsilon_v beyond the bound.
  double soft_log_pmf(long long l) const;
};

// gamma = ceil(12/epsilon_v), widened if the 0.999 coverage bound ever fails.
int gamma_bound(double epsilon_v);

// p_l in closed form: l=0 -> 1-e^{-eps}; |l|>0 -> (e^{-|l|eps} - e^{-(|l|+1)eps})/2.
double noise_pmf(double epsilon_v, long long l);

// Sum of log p over all cells. Hard mode returns -infinity when any |delta|
// exceeds gamma; soft mode substitutes the linear tail extension.
double log_likelihood(const NoiseModel& model, const DeltaVector& deltas,
                      TailMode mode);

}  // namespace dpaudit
