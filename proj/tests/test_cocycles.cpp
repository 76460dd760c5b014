#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "minprod/cocycles.hpp"
#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"

using namespace minprod;

namespace {

const BasisRegistry& reg() {
  static BasisRegistry r({"sqrt2", "sqrt3"});
  return r;
}

SymReal gen(const char* name) { return SymReal::generator(reg(), *reg().find(name)); }

}  // namespace

TEST_CASE("iterated cocycles: base case, constants, cocycle identity") {
  auto rot = circle_rotation(gen("sqrt2"));
  SpacePoint y = circle_point(SymReal(Rational(1, 3)));

  auto f = linear_cocycle(3);
  auto one = iterate_cocycle(f, rot, y, 1);
  CHECK(identical(one[0], SymReal(0)));  // 3 * 1/3 reduced mod 1

  auto c = const_cocycle({SymReal(Rational(2, 7))});
  auto five = iterate_cocycle(c, rot, y, 5);
  CHECK(identical(five[0], sym_frac(SymReal(Rational(10, 7)))));

  // identity f^(k+n) = f^(n)(S^k y) + f^(k)(y), exact in symbols
  long k = 2, n = 3;
  SpacePoint yk = y;
  for (long i = 0; i < k; ++i) yk = rot.step(yk);
  auto lhs = iterate_cocycle(f, rot, y, k + n);
  auto a = iterate_cocycle(f, rot, yk, n);
  auto b = iterate_cocycle(f, rot, y, k);
  CHECK(identical(lhs[0], sym_frac(a[0] + b[0])));

  // numeric identity for a float-only cocycle, many random cases
  auto s = sine_cocycle(0.3);
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    double y0 = rng.unit();
    long kk = 1 + static_cast<long>(rng.below(50));
    long nn = 1 + static_cast<long>(rng.below(50));
    double ykn[1] = {y0};
    double lhs1, rhs_a, rhs_b;
    iterate_cocycle_num(s, rot, ykn, kk + nn, &lhs1);
    double ymid[1] = {y0};
    for (long i = 0; i < kk; ++i) rot.step_num(ymid);
    iterate_cocycle_num(s, rot, ymid, nn, &rhs_a);
    iterate_cocycle_num(s, rot, ykn, kk, &rhs_b);
    CHECK(dist_to_int(lhs1 - rhs_a - rhs_b) < 1e-12);
  }
}

TEST_CASE("coboundaries: constants vanish, telescoping, rotation slope") {
  auto rot = circle_rotation(gen("sqrt2"));

  auto zero = coboundary(const_cocycle({SymReal(Rational(3, 8))}), rot);
  CHECK(zero.is_zero);
  SpacePoint y = circle_point(SymReal(Rational(1, 5)));
  CHECK(identical(zero.eval_sym(y)[0], SymReal(0)));

  // telescoping: result^(7)(y) = xi(S^7 y) - xi(y), exactly
  auto xi = linear_cocycle(2);
  auto cb = coboundary(xi, rot);
  auto it7 = iterate_cocycle(cb, rot, y, 7);
  SpacePoint y7 = y;
  for (int i = 0; i < 7; ++i) y7 = rot.step(y7);
  SymReal expect = sym_frac(xi.eval_sym(y7)[0] - xi.eval_sym(y)[0]);
  CHECK(identical(it7[0], expect));

  // xi(gamma) = gamma over a rotation has coboundary identically alpha
  auto slope = coboundary(anzai_cocycle(), rot);
  for (int i = 0; i < 10; ++i) {
    SpacePoint p = circle_point(SymReal(Rational(i, 11)));
    CHECK(identical(slope.eval_sym(p)[0], sym_frac(gen("sqrt2"))));
  }
}

TEST_CASE("half-turn invariance check") {
  auto rep = invariant_check(sine_cocycle(0.3));
  CHECK(rep.verdict == Verdict::pass);
  CHECK(rep.evidence.at("max_defect").get<double>() <= 1e-12);

  auto quarter = invariant_check(const_cocycle({SymReal(Rational(1, 4))}));
  CHECK(quarter.verdict == Verdict::fail);
  CHECK(quarter.evidence.at("max_defect").get<double>() == doctest::Approx(0.5));

  auto half = invariant_check(const_cocycle({SymReal(Rational(1, 2))}));
  CHECK(half.verdict == Verdict::pass);
  CHECK(half.evidence.at("max_defect").get<double>() == 0.0);
}

TEST_CASE("perturbation: exact landing, small coboundary, clean supports") {
  auto rot = circle_rotation(gen("sqrt2"));
  auto xi = zero_cocycle(1);
  SpacePoint start = circle_point(SymReal(0));

  Ball bw{{0.3}, 0.1};
  Ball gw{{0.37}, 0.1};
  double pos = 0.0;
  long k = 0;
  while (arc_dist(pos, bw.center[0]) >= bw.radius) {
    rot.step_num(&pos);
    ++k;
  }

  auto P = perturb_cocycle(xi, 0.05, rot, start, bw, gw, k);
  CHECK(P.n >= P.N);
  CHECK(P.checks.at("landing_error").get<double>() <= 1e-9);
  CHECK(P.checks.at("coboundary_sup").get<double>() < 0.05);
  CHECK(P.checks.at("theta_at_window_time").get<double>() == 0.0);

  const auto& tab = *P.theta.table;
  // the start is a zero plateau and the landing point a g plateau, bit-exact
  double th0, thk;
  tab.eval(0.0, &th0);
  CHECK(th0 == 0.0);
  double pk = 0.0;
  for (long i = 0; i < k; ++i) rot.step_num(&pk);
  tab.eval(pk, &thk);
  CHECK(thk == 0.0);
  double pkn = pk;
  for (long i = 0; i < P.n; ++i) rot.step_num(&pkn);
  double thkn;
  tab.eval(pkn, &thkn);
  CHECK(thkn == P.g[0]);

  // supports are narrow: most of the table is exactly zero
  std::size_t zero_nodes = 0;
  for (double v2 : tab.vals)
    if (v2 == 0.0) ++zero_nodes;
  CHECK(zero_nodes > tab.vals.size() / 2);

  // refinement stability: coboundary on a grid twice as fine stays < 2 eps
  double ad = frac_double(gen("sqrt2").approx());
  std::size_t fine = tab.nodes() * 2;
  double worst = 0.0;
  for (std::size_t u = 0; u < fine; ++u) {
    double x = static_cast<double>(u) / static_cast<double>(fine);
    double a2, b2;
    tab.eval(frac_double(x + ad), &a2);
    tab.eval(x, &b2);
    worst = std::max(worst, std::fabs(a2 - b2));
  }
  CHECK(worst < 2 * 0.05);

  // zero group displacement admits the zero increment
  Ball gw0{{0.0}, 0.2};
  auto P0 = perturb_cocycle(xi, 0.05, rot, start, bw, gw0, k);
  double z0max = 0.0;
  for (double v3 : P0.theta.table->vals) z0max = std::max(z0max, std::fabs(v3));
  CHECK(z0max == 0.0);
}

TEST_CASE("symmetrized perturbation keeps the antisymmetry bitwise") {
  auto rot = circle_rotation(gen("sqrt2"));
  auto xi = zero_cocycle(1);
  SpacePoint start = circle_point(SymReal(0));
  Ball bw{{0.61}, 0.08};
  Ball gw{{0.25}, 0.08};
  double pos = 0.0;
  long k = 0;
  while (arc_dist(pos, bw.center[0]) >= bw.radius) {
    rot.step_num(&pos);
    ++k;
  }
  PerturbOptions po;
  po.symmetrize = true;
  auto P = perturb_cocycle(xi, 0.08, rot, start, bw, gw, k, po);

  const auto& tab = *P.theta.table;
  std::size_t half = tab.nodes() / 2;
  for (std::size_t u = 0; u < tab.nodes(); ++u)
    CHECK(tab.vals[u] == -tab.vals[(u + half) & (tab.nodes() - 1)]);

  auto rep = invariant_check(coboundary(P.theta, rot));
  CHECK(rep.verdict == Verdict::pass);
  CHECK(P.checks.at("landing_error").get<double>() <= 1e-9);
}

TEST_CASE("greedy builder covers pairs and the hits replay in the skew orbit") {
  auto rot = circle_rotation(gen("sqrt2"));
  std::vector<TransitivePair> pairs = {
      {Ball{{0.05, 0.1}, 0.15}, Ball{{0.5, 0.6}, 0.15}},
      {Ball{{0.3, 0.8}, 0.15}, Ball{{0.9, 0.25}, 0.15}},
      {Ball{{0.7, 0.4}, 0.15}, Ball{{0.2, 0.95}, 0.15}},
  };
  std::vector<double> schedule = {0.1, 0.08, 0.06};
  BuildOptions bo;
  bo.check_horizon = 20000;
  auto built = build_transitive_cocycle(rot, pairs, schedule, 16, bo);
  CHECK(built.complete);
  CHECK(built.perturbations <= 16);

  // replay each reported hit by stepwise skew iteration with the coboundary
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& e = built.coverage[i];
    REQUIRE(e.at("covered").get<bool>());
    long t = e.at("time").get<long>();
    double y = pairs[i].from.center[0];
    double z = pairs[i].from.center[1];
    for (long m = 0; m < t; ++m) {
      double fv;
      built.f.eval_num(&y, &fv);
      z = frac_double(z + fv);
      rot.step_num(&y);
    }
    double d = std::max(arc_dist(y, pairs[i].to.center[0]),
                        arc_dist(z, frac_double(pairs[i].to.center[1])));
    CHECK(d < pairs[i].to.radius + 1e-7);
  }

  // determinism: the same inputs rebuild the identical table
  auto again = build_transitive_cocycle(rot, pairs, schedule, 16, bo);
  REQUIRE(again.transfer.table);
  REQUIRE(built.transfer.table);
  CHECK(again.transfer.table->vals == built.transfer.table->vals);

  // an unreachable pair reports honest partial coverage
  std::vector<TransitivePair> bad = {{Ball{{0.1, 0.1}, 0.1}, Ball{{0.5, 0.5}, 0.1}}};
  auto partial = build_transitive_cocycle(rot, bad, schedule, 0, bo);
  if (!partial.complete) CHECK(partial.coverage[0].at("covered").get<bool>() == false);
}
