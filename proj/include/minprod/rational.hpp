#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "minprod/errors.hpp"

namespace minprod {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int floor_rat(const Rational& q) {
  Int n = numerator(q), d = denominator(q);  // d > 0 canonical
  Int t = n / d;
  if (n < 0 && t * d != n) --t;
  return t;
}

inline Int ceil_rat(const Rational& q) { return -floor_rat(-q); }

inline Rational abs_rat(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational pow10(int k) {
  Int p = 1;
  for (int i = 0; i < k; ++i) p *= 10;
  return Rational(1, p);
}

// Closed rational interval. Invariant: lo <= hi.
struct RatInterval {
  Rational lo, hi;

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0 && 0 <= hi; }

  RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
  RatInterval operator+(const Rational& r) const { return {lo + r, hi + r}; }
  RatInterval operator-() const { return {-hi, -lo}; }

  // Scale by an exact rational (sign-aware).
  RatInterval scaled(const Rational& c) const {
    if (c >= 0) return {lo * c, hi * c};
    return {hi * c, lo * c};
  }

  // Tightest interval containing both (used to keep refinement nested).
  RatInterval intersect(const RatInterval& o) const {
    RatInterval r{lo > o.lo ? lo : o.lo, hi < o.hi ? hi : o.hi};
    if (r.lo > r.hi) throw Error("interval intersection is empty; inconsistent enclosures");
    return r;
  }
};

}  // namespace minprod
