#pragma once

// Deterministic random number generator (splitmix64).  The same seed yields
// the same sequence on every platform, which the replay and report tooling
// relies on.  Independent substreams are derived with stream().

#include <cstdint>

#include "vtg/geometry.hpp"

namespace vtg {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller.
  double gaussian();
  double gaussian(double mean, double sigma);
  Vec3 gaussian_vec3(double sigma);
  Vec3 unit_vector();
  Quat random_rotation();

  // Independent generator derived from this one's seed and a salt; derived
  // streams do not advance the parent state.
  Rng stream(std::uint64_t salt) const;

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
  bool has_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

}  // namespace vtg
