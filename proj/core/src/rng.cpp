#include "vtg/rng.hpp"

#include <cmath>

namespace vtg {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed), seed_(seed) {}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  // 53 random mantissa bits.
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = std::uint64_t(hi - lo) + 1;
  return lo + std::int64_t(next_u64() % span);
}

double Rng::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(a);
  has_cached_gaussian_ = true;
  return r * std::cos(a);
}

double Rng::gaussian(double mean, double sigma) {
  return mean + sigma * gaussian();
}

Vec3 Rng::gaussian_vec3(double sigma) {
  return {gaussian(0.0, sigma), gaussian(0.0, sigma), gaussian(0.0, sigma)};
}

Vec3 Rng::unit_vector() {
  while (true) {
    const Vec3 v{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
    const double n2 = v.squared_norm();
    if (n2 > 1e-12 && n2 <= 1.0) return v / std::sqrt(n2);
  }
}

Quat Rng::random_rotation() {
  // Shoemake's method: uniform over SO(3).
  const double u1 = uniform();
  const double u2 = uniform();
  const double u3 = uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  return Quat{a * std::sin(2.0 * M_PI * u2), a * std::cos(2.0 * M_PI * u2),
              b * std::sin(2.0 * M_PI * u3), b * std::cos(2.0 * M_PI * u3)}
      .normalized();
}

Rng Rng::stream(std::uint64_t salt) const {
  std::uint64_t s = seed_ ^ (salt * 0xd2b74407b1ce6e93ull + 0x9e3779b97f4a7c15ull);
  splitmix64(s);
  return Rng(s);
}

}  // namespace vtg
