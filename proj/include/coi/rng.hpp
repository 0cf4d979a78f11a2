#pragma once

#include <cstdint>
#include <random>

namespace coi {

// Seeded random source shared by every generator in the project. Raw engine
// output is mapped to doubles by hand instead of going through the standard
// distributions, whose output is implementation-defined; identical seeds must
// reproduce identical artifacts byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // Standard normal deviate (Box-Muller, second value cached).
  double gaussian();

  // Beta(a, b) deviate in (0, 1), shapes > 0.
  double beta(double a, double b);

  // Independent child stream.
  Rng fork() { return Rng(engine_()); }

 private:
  double gamma(double shape);

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace coi
