#include "dpaudit/noise_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpaudit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_pmf_closed(double eps, long long l) {
  if (std::isinf(eps)) return l == 0 ? 0.0 : -kInf;
  // log(1 - e^{-eps}) via expm1 stays accurate for small eps.
  const double log_gap = std::log(-std::expm1(-eps));
  if (l == 0) return log_gap;
  const double a = static_cast<double>(l < 0 ? -l : l);
  return std::log(0.5) - a * eps + log_gap;
}

}  // namespace

int gamma_bound(double epsilon_v) {
  if (!(epsilon_v > 0)) throw std::invalid_argument("epsilon_v must be > 0");
  if (std::isinf(epsilon_v)) return 0;
  int g = static_cast<int>(std::ceil(12.0 / epsilon_v));
  // Coverage inside [-g, g] is 1 - e^{-(g+1)eps} >= 1 - e^{-12}, so the loop
  // is a guard rather than an expected path.
  while (-std::expm1(-(static_cast<double>(g) + 1.0) * epsilon_v) < 0.999) ++g;
  return g;
}

double noise_pmf(double epsilon_v, long long l) {
  if (!(epsilon_v > 0)) throw std::invalid_argument("epsilon_v must be > 0");
  const double lp = log_pmf_closed(epsilon_v, l);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

NoiseModel NoiseModel::make(double epsilon_v) {
  if (!(epsilon_v > 0)) throw std::invalid_argument("epsilon_v must be > 0");
  NoiseModel m;
  m.epsilon_v = epsilon_v;
  m.tail_slope = epsilon_v;
  m.gamma = gamma_bound(epsilon_v);
  if (!std::isinf(epsilon_v)) {
    const int base = static_cast<int>(std::ceil(12.0 / epsilon_v));
    m.gamma_widened = m.gamma > base;
  }
  m.log_table.resize(static_cast<std::size_t>(m.gamma) + 1);
  for (int l = 0; l <= m.gamma; ++l) {
    m.log_table[static_cast<std::size_t>(l)] = log_pmf_closed(epsilon_v, l);
  }
  return m;
}

double NoiseModel::log_pmf(long long l) const {
  const long long a = l < 0 ? -l : l;
  if (a <= gamma) return log_table[static_cast<std::size_t>(a)];
  return log_pmf_closed(epsilon_v, a);
}

double NoiseModel::pmf(long long l) const {
  const double lp = log_pmf(l);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double NoiseModel::coverage() const {
  if (std::isinf(epsilon_v)) return 1.0;
  return -std::expm1(-(static_cast<double>(gamma) + 1.0) * epsilon_v);
}

double NoiseModel::soft_log_pmf(long long l) const {
  const long long a = l < 0 ? -l : l;
  if (a <= gamma) return log_table[static_cast<std::size_t>(a)];
  return log_table[static_cast<std::size_t>(gamma)] -
         static_cast<double>(a - gamma) * tail_slope;
}

double log_likelihood(const NoiseModel& model, const DeltaVector& deltas,
                      TailMode mode) {
  double total = 0;
  for (long long d : deltas) {
    const long long a = d < 0 ? -d : d;
    if (a > model.gamma) {
      if (mode == TailMode::hard) return -kInf;
      total += model.soft_log_pmf(d);
    } else {
      total += model.log_table[static_cast<std::size_t>(a)];
    }
  }
  return total;
}

}  // namespace dpaudit
