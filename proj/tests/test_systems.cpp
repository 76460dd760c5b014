#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"
#include "minprod/systems.hpp"

using namespace minprod;

namespace {

const BasisRegistry& reg() {
  static BasisRegistry r({"sqrt2", "sqrt3", "sqrt5", "pi"});
  return r;
}

SymReal gen(const char* name) { return SymReal::generator(reg(), *reg().find(name)); }

SpacePoint iterate(const SystemDescriptor& s, SpacePoint p, long n) {
  for (long i = 0; i < n; ++i) p = s.step(p);
  return p;
}

long first_return(const SystemDescriptor& s, const SpacePoint& start, long cap) {
  SpacePoint p = start;
  for (long n = 1; n <= cap; ++n) {
    p = s.step(p);
    if (exactly_equal(p, start)) return n;
  }
  return -1;
}

}  // namespace

TEST_CASE("circle rotation: exact periods, symbolic step, facts") {
  auto quarter = circle_rotation(SymReal(Rational(1, 4)));
  REQUIRE(quarter.exact_period.has_value());
  CHECK(*quarter.exact_period == 4);
  SpacePoint zero = circle_point(SymReal(0));
  CHECK(exactly_equal(iterate(quarter, zero, 4), zero));
  CHECK(!exactly_equal(iterate(quarter, zero, 2), zero));
  CHECK(quarter.obstruction.has_value());
  CHECK(quarter.obstruction->kind == ObstructionWitness::Kind::FiniteOrder);

  auto ident = circle_rotation(SymReal(0));
  CHECK(*ident.exact_period == 1);
  CHECK(exactly_equal(ident.step(zero), zero));

  auto fifth = circle_rotation(SymReal(Rational(1, 5)));
  std::set<std::string> seen;
  SpacePoint p = zero;
  for (int i = 0; i < 5; ++i) {
    seen.insert(p.as<CirclePt>().s.describe());
    p = fifth.step(p);
  }
  CHECK(seen.size() == 5);
  CHECK(exactly_equal(p, zero));

  auto rot = circle_rotation(gen("sqrt2"));
  CHECK(!rot.exact_period.has_value());
  CHECK(!rot.obstruction.has_value());
  SpacePoint one_step = rot.step(zero);
  SymReal expect = gen("sqrt2") + SymReal(Rational(-1));  // sqrt2 reduced mod 1
  CHECK(identical(one_step.as<CirclePt>().s, expect));
  CHECK(exactly_equal(rot.inverse(one_step), zero));
}

TEST_CASE("torus rotation: orbits, planted relations, character defects") {
  auto half2 = torus_rotation({SymReal(Rational(1, 2)), SymReal(Rational(1, 2))});
  REQUIRE(half2.exact_period.has_value());
  CHECK(*half2.exact_period == 2);
  SpacePoint origin = torus_point({SymReal(0), SymReal(0)});
  CHECK(exactly_equal(iterate(half2, origin, 2), origin));

  auto indep = torus_rotation({gen("sqrt2"), gen("sqrt3")});
  CHECK(!indep.obstruction.has_value());
  CHECK(!indep.exact_period.has_value());
  SpacePoint two = iterate(indep, origin, 2);
  CHECK(identical(two.as<TorusPt>().c[0], gen("sqrt2").scaled(2) + SymReal(Rational(-2))));
  CHECK(identical(two.as<TorusPt>().c[1], gen("sqrt3").scaled(2) + SymReal(Rational(-3))));

  auto diag = torus_rotation({gen("sqrt2"), gen("sqrt2")});
  REQUIRE(diag.obstruction.has_value());
  CHECK(diag.obstruction->kind == ObstructionWitness::Kind::TorusCharacter);
  auto wit = diag.obstruction->detail.at("witness");
  CHECK(wit == json::array({"0", "1", "-1"}));
  REQUIRE(diag.obstruction->defect);
  double start[2] = {0.0, 0.0};
  double on_orbit[2] = {0.37, 0.37};
  double off_orbit[2] = {0.25, 0.5};
  CHECK(diag.obstruction->defect(start, on_orbit) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(diag.obstruction->defect(start, off_orbit) == doctest::Approx(0.25));

  auto shifted = torus_rotation({gen("sqrt2"), gen("sqrt2") + SymReal(Rational(1, 2))});
  REQUIRE(shifted.obstruction.has_value());
  CHECK(shifted.obstruction->detail.at("witness") == json::array({"1", "2", "-2"}));
}

TEST_CASE("odometer: carries, exhaustive period, inverse") {
  auto od = odometer(2, 3);
  SpacePoint w000 = cantor_point({0, 0, 0}, 2);
  SpacePoint w100 = cantor_point({1, 0, 0}, 2);
  SpacePoint w111 = cantor_point({1, 1, 1}, 2);
  CHECK(exactly_equal(od.step(w000), w100));
  CHECK(exactly_equal(od.step(w111), w000));
  CHECK(first_return(od, w000, 100) == 8);
  REQUIRE(od.exact_period.has_value());
  CHECK(*od.exact_period == 8);

  auto od3 = odometer(3, 2);
  std::set<std::vector<std::uint8_t>> states;
  SpacePoint p = cantor_point({0, 0}, 3);
  for (int i = 0; i < 9; ++i) {
    states.insert(p.as<CantorPt>().w);
    p = od3.step(p);
  }
  CHECK(states.size() == 9);
  CHECK(exactly_equal(p, cantor_point({0, 0}, 3)));

  auto big = odometer(2, 10);
  auto samples = big.space.sampler(20, 7);
  for (const auto& q : samples) {
    CHECK(exactly_equal(big.inverse(big.step(q)), q));
    auto coords = big.space.embed(q);
    auto expect = big.space.embed(big.step(q));
    big.step_num(coords.data());
    CHECK(coords == expect);
  }
}

TEST_CASE("suspension time-t: height arithmetic, group law, periods") {
  auto h = odometer(2, 4);
  SpacePoint y0 = cantor_point({0, 0, 0, 0}, 2);

  auto half = suspension_time_t(h, SymReal(Rational(1, 2)));
  SpacePoint p = solenoid_point(y0.as<CantorPt>(), SymReal(Rational(3, 4)));
  SpacePoint q = half.step(p);
  CHECK(q.as<SolenoidPt>().y.w == std::vector<std::uint8_t>({1, 0, 0, 0}));
  CHECK(identical(q.as<SolenoidPt>().s, SymReal(Rational(1, 4))));

  auto zero = suspension_time_t(h, SymReal(0));
  CHECK(exactly_equal(zero.step(p), p));

  auto unit = suspension_time_t(h, SymReal(1));
  SpacePoint base0 = solenoid_point(y0.as<CantorPt>(), SymReal(0));
  SpacePoint moved = unit.step(base0);
  CHECK(moved.as<SolenoidPt>().y.w == std::vector<std::uint8_t>({1, 0, 0, 0}));
  CHECK(identical(moved.as<SolenoidPt>().s, SymReal(0)));

  // composition law, including a negative time needing the inverse branch
  Rng rng(11);
  std::vector<SymReal> times = {SymReal(Rational(1, 3)), SymReal(Rational(7, 5)),
                                SymReal(Rational(-3, 4)), gen("sqrt2"),
                                gen("sqrt2").scaled(Rational(-1, 2))};
  auto samples = half.space.sampler(6, 3);
  for (const auto& s : times) {
    for (const auto& t : times) {
      auto fs = suspension_time_t(h, s);
      auto ft = suspension_time_t(h, t);
      auto fst = suspension_time_t(h, s + t);
      for (const auto& pt : samples) {
        CHECK(exactly_equal(fs.step(ft.step(pt)), fst.step(pt)));
      }
    }
  }

  REQUIRE(half.exact_period.has_value());
  CHECK(*half.exact_period == 32);
  CHECK(first_return(half, base0, 64) == 32);

  for (const auto& pt : samples) {
    auto coords = half.space.embed(pt);
    auto expect = half.space.embed(half.step(pt));
    half.step_num(coords.data());
    for (std::size_t i = 0; i < coords.size(); ++i)
      CHECK(coords[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("denjoy blow-up: semiconjugacy, fibers, order embedding") {
  auto dj = denjoy_system(gen("sqrt2"), Rational(1, 4), 20);
  const auto& sys = dj.system;
  const auto& fm = dj.factor;
  const auto& model = dj.model;
  auto rot = circle_rotation(gen("sqrt2"));

  auto samples = sys.space.sampler(40, 5);
  for (const auto& p : samples) {
    SpacePoint lhs = fm.project(sys.step(p));
    SpacePoint rhs = rot.step(fm.project(p));
    CHECK(exactly_equal(lhs, rhs));
    CHECK(exactly_equal(sys.inverse(sys.step(p)), p));
  }

  CHECK(fm.fiber_probe(circle_point(model->marked_point(5)), 1e-3).size() == 2);
  CHECK(fm.fiber_probe(circle_point(SymReal(Rational(1, 3))), 1e-3).size() == 1);

  CHECK(model->gap_len(0) == Rational(3, 16));
  for (long n = 0; n < 10; ++n) {
    CHECK(model->gap_len(n + 1) == model->gap_len(n) / 2);
    CHECK(model->gap_len(-n) == model->gap_len(n));
  }

  // order embedding strictly increases along the circular order, doubling at
  // marked points with the minus copy below the plus copy
  std::vector<std::array<double, 2>> keyed;
  for (const auto& p : samples) {
    auto c = sys.space.embed(p);
    keyed.push_back({c[1] + (c[2] > 0 ? 1e-14 : 0.0), c[0]});
  }
  for (long n = -3; n <= 3; ++n) {
    for (Side side : {Side::minus, Side::plus}) {
      auto c = sys.space.embed(SpacePoint{DenjoyPt{model->marked_point(n), side, n}});
      keyed.push_back({c[1] + (c[2] > 0 ? 1e-14 : 0.0), c[0]});
    }
  }
  std::sort(keyed.begin(), keyed.end());
  keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());
  for (std::size_t i = 1; i < keyed.size(); ++i) CHECK(keyed[i][1] > keyed[i - 1][1]);

  // marked orbit bookkeeping: index advances, window exit degrades the side
  SpacePoint marked = SpacePoint{DenjoyPt{model->marked_point(0), Side::minus, 0}};
  SpacePoint stepped = sys.step(marked);
  CHECK(stepped.as<DenjoyPt>().side == Side::minus);
  CHECK(stepped.as<DenjoyPt>().idx == 1);
  CHECK(identical(stepped.as<DenjoyPt>().pos, model->marked_point(1)));
  SpacePoint at_edge = SpacePoint{DenjoyPt{model->marked_point(20), Side::plus, 20}};
  CHECK(sys.step(at_edge).as<DenjoyPt>().side == Side::none);
  CHECK_THROWS_AS(model->marked_point(21), WindowOverflow);

  for (const auto& p : samples) {
    auto coords = sys.space.embed(p);
    SpacePoint q = p;
    for (int k = 0; k < 25; ++k) {
      sys.step_num(coords.data());
      q = sys.step(q);
    }
    auto expect = sys.space.embed(q);
    CHECK(coords[0] == doctest::Approx(expect[0]).epsilon(1e-9));
    CHECK(coords[2] == expect[2]);
    CHECK(coords[3] == expect[3]);
  }
}

TEST_CASE("quaternion translation: subgroup orbit, axis invariant") {
  auto ident = s3_translation(1, 0, 0, 0);
  SpacePoint e = quat_point(1, 0, 0, 0);
  CHECK(exactly_equal(ident.step(e), e));
  REQUIRE(ident.exact_period.has_value());
  CHECK(*ident.exact_period == 1);

  auto neg = s3_translation(-1, 0, 0, 0);
  CHECK(*neg.exact_period == 2);
  CHECK(exactly_equal(neg.step(neg.step(e)), e));

  double th = 1.0;
  auto rot = s3_translation(std::cos(th), std::sin(th), 0, 0);
  REQUIRE(rot.obstruction.has_value());
  CHECK(rot.obstruction->kind == ObstructionWitness::Kind::S3Axis);
  auto start = rot.space.embed(e);
  SpacePoint p = e;
  double sqrt2 = std::sqrt(2.0);
  for (int k = 0; k < 200; ++k) {
    p = rot.step(p);
    const auto& q = p.as<QuatPt>().q;
    CHECK(q[2] == 0.0);
    CHECK(q[3] == 0.0);
    CHECK(std::fabs(q[0] * q[0] + q[1] * q[1] - 1.0) <= 1e-12);
    auto x = rot.space.embed(p);
    CHECK(rot.obstruction->defect(start.data(), x.data()) <= 1e-6);
    double w[4] = {0, 0, 1, 0};
    CHECK(std::fabs(rot.space.metric_num(x.data(), w) - sqrt2) <= 1e-12);
  }
  CHECK(exactly_equal(rot.inverse(rot.step(e)), e));
}

TEST_CASE("two circles skew: label cycle, fourth power, invariant") {
  auto alpha = gen("sqrt2");
  auto beta = gen("sqrt3");
  auto f = two_circles_skew(alpha, beta);

  auto labels = [](const SpacePoint& p) {
    const auto& pp = p.as<ProductPt>();
    return std::make_pair(pp.a->as<ProductPt>().a->as<FinitePt>().i,
                          pp.b->as<ProductPt>().a->as<FinitePt>().i);
  };
  auto mk = [&](long j, const SymReal& z, long i, const SymReal& xi) {
    return product_point(product_point(finite_point(j, 2), circle_point(z)),
                         product_point(finite_point(i, 2), circle_point(xi)));
  };

  SpacePoint p = mk(0, SymReal(0), 0, SymReal(0));
  std::vector<std::pair<long, long>> cycle;
  SpacePoint q = p;
  for (int k = 0; k < 4; ++k) {
    q = f.step(q);
    cycle.push_back(labels(q));
  }
  CHECK(cycle == std::vector<std::pair<long, long>>({{1, 0}, {0, 1}, {1, 1}, {0, 0}}));

  // the fourth power on the return component adds (2 alpha, 2 beta)
  SpacePoint four = iterate(f, mk(0, SymReal(Rational(1, 7)), 0, SymReal(Rational(2, 9))), 4);
  const auto& fp = four.as<ProductPt>();
  CHECK(identical(fp.a->as<ProductPt>().b->as<CirclePt>().s,
                  sym_frac(SymReal(Rational(1, 7)) + alpha.scaled(2))));
  CHECK(identical(fp.b->as<ProductPt>().b->as<CirclePt>().s,
                  sym_frac(SymReal(Rational(2, 9)) + beta.scaled(2))));

  // with beta = alpha the difference of circle coordinates is F^4-invariant
  auto g = two_circles_skew(alpha, alpha);
  SymReal z0 = SymReal(Rational(1, 7)), xi0 = gen("sqrt3").scaled(Rational(1, 3));
  SpacePoint r = iterate(g, mk(0, z0, 0, xi0), 4);
  const auto& rp = r.as<ProductPt>();
  SymReal diff0 = sym_frac(xi0 - z0);
  SymReal diff4 = sym_frac(rp.b->as<ProductPt>().b->as<CirclePt>().s -
                           rp.a->as<ProductPt>().b->as<CirclePt>().s);
  CHECK(identical(diff0, diff4));

  // the base map swaps the circles exactly, so any direct product of such
  // maps carries (S0 x S0) u (S1 x S1) onto (S1 x S1) u (S0 x S0)
  auto base = two_circles_base(alpha);
  for (const auto& s : base.space.sampler(8, 4)) {
    long before = s.as<ProductPt>().a->as<FinitePt>().i;
    SpacePoint t = base.step(s);
    CHECK(t.as<ProductPt>().a->as<FinitePt>().i == 1 - before);
    CHECK(exactly_equal(base.inverse(t), s));
  }
  SpacePoint b0 = product_point(finite_point(0, 2), circle_point(SymReal(Rational(1, 7))));
  SpacePoint b2 = base.step(base.step(b0));
  CHECK(identical(b2.as<ProductPt>().b->as<CirclePt>().s,
                  sym_frac(SymReal(Rational(1, 7)) + alpha)));
  auto base_rat = two_circles_base(SymReal(Rational(1, 3)));
  REQUIRE(base_rat.exact_period.has_value());
  CHECK(*base_rat.exact_period == 6);
  CHECK(first_return(base_rat, b0, 32) == 6);

  auto rational = two_circles_skew(SymReal(Rational(1, 4)), SymReal(Rational(1, 2)));
  REQUIRE(rational.exact_period.has_value());
  CHECK(*rational.exact_period == 8);
  CHECK(first_return(rational, mk(0, SymReal(0), 0, SymReal(0)), 64) == 8);

  for (const auto& s : f.space.sampler(10, 2)) {
    CHECK(exactly_equal(f.inverse(f.step(s)), s));
    auto coords = f.space.embed(s);
    auto expect = f.space.embed(f.step(s));
    f.step_num(coords.data());
    for (std::size_t i = 0; i < coords.size(); ++i)
      CHECK(coords[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("metric axioms, net covering, and ball indexers across spaces") {
  auto dj = denjoy_system(gen("sqrt2"), Rational(1, 4), 12);
  std::vector<SystemDescriptor> battery;
  battery.push_back(circle_rotation(gen("sqrt2")));
  battery.push_back(torus_rotation({gen("sqrt2"), gen("sqrt3")}));
  battery.push_back(odometer(2, 6));
  battery.push_back(suspension_time_t(odometer(2, 4), gen("sqrt2")));
  battery.push_back(dj.system);
  battery.push_back(s3_translation(std::cos(1.0), std::sin(1.0), 0, 0));
  battery.push_back(two_circles_skew(gen("sqrt2"), gen("sqrt3")));
  battery.push_back(cyclic_system(5));

  for (const auto& sys : battery) {
    CAPTURE(sys.name);
    const auto& sp = sys.space;
    auto pts = sp.sampler(12, 9);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto a = sp.embed(pts[i]);
      REQUIRE(a.size() == sp.dim);
      CHECK(sp.metric_num(a.data(), a.data()) == 0.0);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        auto b = sp.embed(pts[j]);
        double dab = sp.metric_num(a.data(), b.data());
        CHECK(dab >= 0.0);
        CHECK(std::fabs(dab - sp.metric_num(b.data(), a.data())) <= 1e-12);
        for (std::size_t k = 0; k < pts.size(); k += 3) {
          auto c = sp.embed(pts[k]);
          double dac = sp.metric_num(a.data(), c.data());
          double dbc = sp.metric_num(b.data(), c.data());
          CHECK(dac <= dab + dbc + 1e-12);
        }
      }
    }

    for (double eps : {0.4, 0.15}) {
      auto net = sp.make_net(eps);
      REQUIRE(net.size() > 0);
      // membership: the step keeps net points inside the space
      for (std::size_t i = 0; i < net.size(); i += 1 + net.size() / 40) {
        SpacePoint stepped = sys.step(net.points[i]);
        CHECK(sp.embed(stepped).size() == sp.dim);
      }
      // covering: sampled points land within eps of some center
      for (const auto& p : pts) {
        auto x = sp.embed(p);
        double best = 1e300;
        for (std::size_t i = 0; i < net.size(); ++i)
          best = std::min(best, sp.metric_num(x.data(), net.center(i)));
        CHECK(best <= eps + 1e-9);
      }
      // the reverse index agrees with brute force away from ball boundaries
      for (const auto& p : pts) {
        auto x = sp.embed(p);
        std::vector<std::size_t> got;
        net.hit(x.data(), got);
        std::sort(got.begin(), got.end());
        got.erase(std::unique(got.begin(), got.end()), got.end());
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < net.size(); ++i) {
          double d = sp.metric_num(x.data(), net.center(i));
          if (std::fabs(d - eps) <= 1e-9) {
            // boundary: accept either verdict
            if (std::binary_search(got.begin(), got.end(), i)) want.push_back(i);
            continue;
          }
          if (d < eps) want.push_back(i);
        }
        CHECK(got == want);
      }
    }
  }
}
