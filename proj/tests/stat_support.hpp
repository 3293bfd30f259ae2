#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dpaudit/noise_model.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {
namespace teststat {

// Q(a, x) by series (x < a+1) or continued fraction (x >= a+1); this backs
// the goodness-of-fit p-value without any external stats dependency.
inline double upper_regularized_gamma(double a, double x) {
  if (x <= 0) return 1.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1) {
    // P(a,x) series, then Q = 1 - P.
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    return 1.0 - p;
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma_a) * h;
}

inline double chi_square_p_value(double statistic, int dof) {
  return upper_regularized_gamma(dof / 2.0, statistic / 2.0);
}

// Draw integer noise and test the empirical distribution over [-gamma, gamma]
// against the pmf table. Bins pool toward the center via the standard >=5
// expected-count rule; the out-of-range category (mass 1 - coverage) joins
// the final pool so observed and expected totals both equal the draw count.
inline double noise_gof_p_value(double eps, int draws, std::uint64_t seed) {
  const NoiseModel model = NoiseModel::make(eps);
  Rng rng(seed);
  const int g = model.gamma;
  std::vector<int> observed(2 * g + 1, 0);
  int outside = 0;
  for (int i = 0; i < draws; ++i) {
    const long long l = rng.laplace_int(eps);
    if (l < -g || l > g) {
      ++outside;
    } else {
      ++observed[static_cast<int>(l) + g];
    }
  }
  std::vector<double> expected(2 * g + 1);
  for (int b = 0; b <= 2 * g; ++b) {
    expected[b] = draws * model.pmf(b - g);
  }
  std::vector<double> pooled_exp;
  std::vector<double> pooled_obs;
  double acc_e = draws * (1.0 - model.coverage());
  double acc_o = outside;
  for (int b = 0; b <= 2 * g; ++b) {
    acc_e += expected[b];
    acc_o += observed[b];
    if (acc_e >= 5.0) {
      pooled_exp.push_back(acc_e);
      pooled_obs.push_back(acc_o);
      acc_e = acc_o = 0;
    }
  }
  if (acc_e > 0 && !pooled_exp.empty()) {
    pooled_exp.back() += acc_e;
    pooled_obs.back() += acc_o;
  }
  double statistic = 0;
  for (std::size_t b = 0; b < pooled_exp.size(); ++b) {
    const double d = pooled_obs[b] - pooled_exp[b];
    statistic += d * d / pooled_exp[b];
  }
  return chi_square_p_value(statistic, static_cast<int>(pooled_exp.size()) - 1);
}

}  // namespace teststat
}  // namespace dpaudit
