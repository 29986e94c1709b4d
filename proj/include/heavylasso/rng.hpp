#pragma once

// Portable, seedable random numbers for the simulation harness.
//
// Bits come from std::mt19937_64 (its output sequence is fixed by the
// standard) seeded through one splitmix64 step. The std:: distributions are
// implementation-defined, so every variate is produced here by an explicit
// transform:
//   uniform   53 high bits, mapped into the open interval (0, 1)
//   normal    Box-Muller, both outputs used in order
//   t_df      Z / sqrt(chi2_df / df), chi2_df a sum of df squared normals
//   cauchy    tan(pi (U - 1/2))

#include <cstdint>
#include <random>

namespace heavylasso {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t bits() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t below(std::uint64_t bound);
  double normal();
  double student_t(int df);
  double cauchy();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace heavylasso
