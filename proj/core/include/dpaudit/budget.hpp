#pragma once

#include <utility>

namespace dpaudit {

enum class Composition { basic, advanced };

struct GaussianBudget {
  double epsilon_v = 0;
  double delta_v = 0;
  double sigma = 0;
  Composition composition = Composition::basic;
  double delta_prime = 0;  // advanced only
};

// sigma^2 = 2 ln(1.25/delta_v) / epsilon_v^2.
double gaussian_sigma(double epsilon_v, double delta_v);

// Total (epsilon, delta) of num_trees parallel per-leaf mechanisms:
// basic    -> (T eps_v, T delta_v)
// advanced -> (sqrt(2 T ln(1/delta')) eps_v + T eps_v (e^{eps_v}-1),
//              T delta_v + delta')
std::pair<double, double> compose_budget(double epsilon_v, double delta_v,
                                         int num_trees, Composition mode,
                                         double delta_prime = 0);

// Inverse of the advanced composition in epsilon_v: the per-mechanism budget
// whose advanced total equals epsilon_total. Bisection to ~1e-14 relative.
double advanced_epsilon_v(double epsilon_total, int num_trees,
                          double delta_prime);

}  // namespace dpaudit
