#include "dpaudit/rng.hpp"

#include <cmath>

namespace dpaudit {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t threshold = -bound % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

double Rng::uniform_double() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

long long Rng::laplace_int(double epsilon) {
  // Inverse-CDF sampling: u uniform on (-1/2, 1/2), x = -sign(u) ln(1-2|u|)/eps.
  for (;;) {
    const double u = uniform_double() - 0.5;
    const double a = 1.0 - 2.0 * std::fabs(u);
    if (a <= 0.0) continue;  // u == -1/2 would map to infinity
    const double x = (u < 0 ? 1.0 : -1.0) * std::log(a) / epsilon;
    return static_cast<long long>(std::trunc(x));
  }
}

std::uint64_t Rng::derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> labels) {
  // Avalanche the master first so swapping it with a label cannot yield the
  // same stream.
  std::uint64_t h = master;
  std::uint64_t acc = splitmix64(h);
  for (std::uint64_t label : labels) {
    std::uint64_t s = acc ^ (label + 0x9e3779b97f4a7c15ULL);
    acc = splitmix64(s);
  }
  return acc;
}

}  // namespace dpaudit
