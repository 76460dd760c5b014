#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "minprod/symreal.hpp"

using namespace minprod;

namespace {

// Independent enclosure oracle: plain interval bisection of x^2 = n starting
// from [0, n]. Deliberately avoids the integer square root used by the
// library so the two routes cross-check each other.
RatInterval bisect_sqrt(long n, int steps) {
  Rational lo = 0, hi = n < 4 ? Rational(2) : Rational(n);
  for (int i = 0; i < steps; ++i) {
    Rational m = (lo + hi) / 2;
    if (m * m <= n)
      lo = m;
    else
      hi = m;
  }
  return {lo, hi};
}

Rational qpow10(int k) { return pow10(k); }

// First 30 decimal digits of pi, frozen: 3.141592653589793238462643383279...
const Rational pi_lo = Rational(Int("3141592653589793238462643383279"), denominator(qpow10(30)));
const Rational pi_hi = pi_lo + qpow10(30);

}  // namespace

TEST_CASE("square root enclosures agree with bisection and shrink on demand") {
  BasisRegistry reg({"sqrt2", "sqrt3", "sqrt5"});
  SymReal r2 = SymReal::generator(reg, 0);

  RatInterval ref = bisect_sqrt(2, 140);
  RatInterval coarse = sym_eval(r2, qpow10(5));
  RatInterval fine = sym_eval(r2, qpow10(30));
  CHECK(coarse.width() <= qpow10(5));
  CHECK(fine.width() <= qpow10(30));
  // Both enclose the bisection value.
  CHECK(coarse.lo <= ref.hi);
  CHECK(coarse.hi >= ref.lo);
  CHECK(fine.lo <= ref.hi);
  CHECK(fine.hi >= ref.lo);
  // Nested as eps decreases.
  CHECK(fine.lo >= coarse.lo);
  CHECK(fine.hi <= coarse.hi);
  CHECK(r2.approx() == doctest::Approx(1.4142135623730951).epsilon(1e-15));
}

TEST_CASE("pi enclosure matches frozen digits") {
  BasisRegistry reg({"pi"});
  RatInterval iv = sym_eval(SymReal::generator(reg, 0), qpow10(32));
  CHECK(iv.lo >= pi_lo - qpow10(30));
  CHECK(iv.hi <= pi_hi + qpow10(30));
  CHECK(iv.width() <= qpow10(32));
}

TEST_CASE("golden ratio enclosure is (1+sqrt5)/2") {
  BasisRegistry reg({"golden"});
  RatInterval iv = sym_eval(SymReal::generator(reg, 0), qpow10(20));
  RatInterval s5 = bisect_sqrt(5, 100);
  CHECK(iv.lo <= (1 + s5.hi) / 2);
  CHECK(iv.hi >= (1 + s5.lo) / 2);
}

TEST_CASE("floor and frac are exact and shift invariant") {
  BasisRegistry reg({"sqrt2"});
  SymReal r2 = SymReal::generator(reg, 0);

  CHECK(sym_floor(r2) == 1);
  CHECK(sym_floor(-r2) == -2);
  CHECK(sym_floor(SymReal(Rational(-7, 2))) == -4);

  SymReal f = sym_frac(r2);
  CHECK(f.rational_part() == -1);
  CHECK(f.coeff_of(0) == 1);

  // frac(x + n) == frac(x) exactly, as coefficient vectors.
  SymReal shifted = r2 + SymReal(Rational(5));
  CHECK(identical(sym_frac(shifted), f));
  SymReal neg = r2 - SymReal(Rational(3));
  CHECK(identical(sym_frac(neg), f));

  CHECK(identical(sym_frac(SymReal(Rational(3, 2))), SymReal(Rational(1, 2))));
}

TEST_CASE("comparison decides strict order and flags exhausted budgets") {
  BasisRegistry reg({"sqrt2", "sqrt3", "sqrt5"});
  SymReal r2 = SymReal::generator(reg, 0);
  SymReal r3 = SymReal::generator(reg, 1);
  SymReal r5 = SymReal::generator(reg, 2);

  CHECK(sym_compare(r2 + r3, r5) == 1);   // 3.146... > 2.236...
  CHECK(sym_compare(r2, r3) == -1);
  CHECK(sym_compare(r2 + SymReal(Rational(1, 7)), r2 + SymReal(Rational(1, 7))) == 0);
  CHECK(sym_compare(r2.scaled(Rational(1, 2)), SymReal(Rational(707, 1000))) == 1);

  // A registry that breaks the independence axiom: sqrt8 = 2*sqrt2. The
  // difference is genuinely zero but not identically zero, so refinement
  // must run out of budget rather than decide.
  BasisRegistry broken({"sqrt2"});
  broken.add("sqrt8", [](const Rational& e) {
    RatInterval s2 = BasisRegistry::catalog_oracle("sqrt2")(e / 2);
    return RatInterval{2 * s2.lo, 2 * s2.hi};
  });
  SymReal a = SymReal::generator(broken, 1);
  SymReal b = SymReal::generator(broken, 0).scaled(2);
  CHECK_THROWS_AS(sym_compare(a, b), RefinementBudgetExceeded);
  CHECK_THROWS_AS(sym_floor(a - b + SymReal(Rational(1))), PrecisionExhausted);
}

TEST_CASE("independence: frozen witnesses and invariances") {
  BasisRegistry reg({"sqrt2", "sqrt3", "sqrt5"});
  SymReal r2 = SymReal::generator(reg, 0);
  SymReal r3 = SymReal::generator(reg, 1);

  CHECK(rational_independence({r2}).independent);
  CHECK(rational_independence({r2, r3}).independent);
  CHECK(rational_independence({r2 + r3, r2 - r3}).independent);

  auto d1 = rational_independence({SymReal(Rational(1, 3))});
  REQUIRE_FALSE(d1.independent);
  CHECK(d1.witness == std::vector<Int>{1, -3});

  auto d2 = rational_independence({r2, r2 + SymReal(Rational(1, 2))});
  REQUIRE_FALSE(d2.independent);
  CHECK(d2.witness == std::vector<Int>{1, 2, -2});

  auto d3 = rational_independence({r2, r2});
  REQUIRE_FALSE(d3.independent);
  CHECK(d3.witness == std::vector<Int>{0, 1, -1});

  auto d4 = rational_independence({r2 + r3, r2 - r3, SymReal(Rational(1, 7))});
  REQUIRE_FALSE(d4.independent);
  CHECK(d4.witness == std::vector<Int>{1, 0, 0, -7});

  // Verdict invariant under permutation and integer shifts.
  auto d5 = rational_independence({r2 + SymReal(Rational(1, 2)), r2 + SymReal(5)});
  CHECK_FALSE(d5.independent);
  auto i1 = rational_independence({r3 - SymReal(2), r2});
  CHECK(i1.independent);

  // Witness evaluation: w0 + sum wi*xs[i] is exactly zero, and an interval
  // evaluation at width 1e-12 contains zero.
  std::vector<SymReal> xs = {r2, r2 + SymReal(Rational(1, 2))};
  auto dep = rational_independence(xs);
  SymReal combo{Rational(dep.witness[0])};
  for (std::size_t i = 0; i < xs.size(); ++i)
    combo = combo + xs[i].scaled(Rational(dep.witness[i + 1]));
  CHECK(combo.is_zero());
  CHECK(sym_eval(combo, qpow10(12)).contains_zero());
}

TEST_CASE("registry is append-only with stable indices and rejects mixing") {
  BasisRegistry reg({"sqrt2"});
  CHECK(reg.size() == 1);
  std::size_t i3 = reg.add_named("sqrt3");
  CHECK(i3 == 1);
  CHECK(reg.name(0) == "sqrt2");
  CHECK(reg.find("sqrt3").value() == 1);
  CHECK_FALSE(reg.find("pi").has_value());
  CHECK_THROWS_AS(reg.add_named("sqrt2"), Error);

  BasisRegistry other({"sqrt2"});
  SymReal a = SymReal::generator(reg, 0);
  SymReal b = SymReal::generator(other, 0);
  CHECK_THROWS_AS(a + b, Error);
}
