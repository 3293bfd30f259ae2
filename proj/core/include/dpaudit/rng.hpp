#pragma once

#include <cstdint>
#include <initializer_list>

namespace dpaudit {

// Deterministic xoshiro256++ generator. The standard library distributions are
// implementation-defined, so all sampling helpers live here to keep artifacts
// byte-identical across platforms for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // Unbiased draw from [0, bound); bound must be > 0.
  std::uint64_t uniform_int(std::uint64_t bound);

  // Draw from [0, 1) with 53 random mantissa bits.
  double uniform_double();

  // Integer part of a Laplace(1/epsilon) draw; truncation toward zero.
  long long laplace_int(double epsilon);

  // Stateless stream derivation: hashing a master seed with stream labels
  // yields independent seeds. Adding new labels never perturbs existing
  // streams, which keeps sweep grids extensible.
  static std::uint64_t derive(std::uint64_t master,
                              std::initializer_list<std::uint64_t> labels);

 private:
  std::uint64_t state_[4];
};

}  // namespace dpaudit
