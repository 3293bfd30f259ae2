#include "dpaudit/budget.hpp"

#include <cmath>
#include <stdexcept>

namespace dpaudit {

double gaussian_sigma(double epsilon_v, double delta_v) {
  if (!(epsilon_v > 0)) throw std::invalid_argument("epsilon_v must be > 0");
  if (!(delta_v > 0 && delta_v < 1)) {
    throw std::invalid_argument("delta_v must be in (0, 1)");
  }
  const double ln_term = std::log(1.25 / delta_v);
  if (!(ln_term > 0)) throw std::invalid_argument("delta_v too large for the bound");
  return std::sqrt(2.0 * ln_term) / epsilon_v;
}

std::pair<double, double> compose_budget(double epsilon_v, double delta_v,
                                         int num_trees, Composition mode,
                                         double delta_prime) {
  if (!(epsilon_v > 0)) throw std::invalid_argument("epsilon_v must be > 0");
  if (!(delta_v >= 0 && delta_v < 1)) {
    throw std::invalid_argument("delta_v must be in [0, 1)");
  }
  if (num_trees < 1) throw std::invalid_argument("num_trees must be >= 1");
  const double t = static_cast<double>(num_trees);
  if (mode == Composition::basic) {
    return {t * epsilon_v, t * delta_v};
  }
  if (!(delta_prime > 0 && delta_prime < 1)) {
    throw std::invalid_argument("advanced composition needs delta' in (0, 1)");
  }
  const double eps = std::sqrt(2.0 * t * std::log(1.0 / delta_prime)) * epsilon_v +
                     t * epsilon_v * std::expm1(epsilon_v);
  return {eps, t * delta_v + delta_prime};
}

double advanced_epsilon_v(double epsilon_total, int num_trees,
                          double delta_prime) {
  if (!(epsilon_total > 0)) throw std::invalid_argument("epsilon_total must be > 0");
  auto total = [&](double ev) {
    return compose_budget(ev, 0.0, num_trees, Composition::advanced, delta_prime)
        .first;
  };
  double lo = 0, hi = 1;
  while (total(hi) < epsilon_total) hi *= 2;
  // The advanced total is strictly increasing in epsilon_v.
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) < epsilon_total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace dpaudit
