#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace minprod {

// x mod 1 in [0, 1). Total on finite doubles.
inline double frac_double(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // rounding at the top edge
  return f;
}

// Arc distance on the circle for values already in [0,1).
inline double arc_dist(double a, double b) {
  double d = std::fabs(a - b);
  return d <= 0.5 ? d : 1.0 - d;
}

// Distance from x to the nearest integer.
inline double dist_to_int(double x) {
  double r = x - std::nearbyint(x);
  return std::fabs(r);
}

// sin(pi*x), cos(pi*x) with exact range reduction: r = x - round(x) is exact
// in IEEE double, so sinpi(x + 1) == -sinpi(x) holds bitwise. This is what
// makes antisymmetry identities and the alpha = 1/2 character sums exact.
inline double sinpi(double x) {
  double k = std::nearbyint(x);
  double r = x - k;
  double s = std::sin(M_PI * r);
  return (static_cast<long long>(k) & 1) ? -s : s;
}

inline double cospi(double x) {
  double k = std::nearbyint(x);
  double r = x - k;
  double c = std::cos(M_PI * r);
  return (static_cast<long long>(k) & 1) ? -c : c;
}

// FNV-1a 64-bit content hash, hex-encoded.
inline std::string fnv1a64_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Deterministic RNG wrapper. The std distributions are implementation
// defined, so extraction is done by hand to keep reports reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

  // Uniform dyadic in [0, 1) with 53-bit numerator.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1p-53; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Box-Muller, explicit for portability.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0, u2;
    while (u1 <= 1e-300) u1 = unit();
    u2 = unit();
    double m = std::sqrt(-2.0 * std::log(u1));
    spare_ = m * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return m * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace minprod
