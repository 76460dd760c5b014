#include "minprod/systems.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"

namespace minprod {

namespace {

double wrap_unit(double x) {
  if (x >= 1.0) x -= 1.0;
  if (x < 0.0) x += 1.0;
  return x;
}

std::vector<std::string> describe_all(const std::vector<SymReal>& xs) {
  std::vector<std::string> out;
  for (const auto& x : xs) out.push_back(x.describe());
  return out;
}

}  // namespace

std::string to_string(ObstructionWitness::Kind k) {
  switch (k) {
    case ObstructionWitness::Kind::FiniteOrder: return "finite-order";
    case ObstructionWitness::Kind::TorusCharacter: return "torus-character";
    case ObstructionWitness::Kind::S3Axis: return "s3-axis-invariant";
    case ObstructionWitness::Kind::ZeroCocycle: return "zero-cocycle";
  }
  return "unknown";
}

RotationFacts rotation_facts(const std::vector<SymReal>& alphas) {
  RotationFacts facts;
  bool all_rational = true;
  for (const auto& a : alphas)
    if (!a.is_rational()) all_rational = false;
  if (all_rational) {
    Int period = 1;
    for (const auto& a : alphas)
      period = boost::multiprecision::lcm(period, Int(denominator(sym_frac(a).rational_part())));
    facts.period = period;
    ObstructionWitness ow;
    ow.kind = ObstructionWitness::Kind::FiniteOrder;
    ow.detail = {{"period", period.str()}};
    facts.obstruction = ow;
    return facts;
  }
  Independence ind = rational_independence(alphas);
  if (ind.independent) return facts;
  ObstructionWitness ow;
  ow.kind = ObstructionWitness::Kind::TorusCharacter;
  std::vector<double> character;
  json wit = json::array();
  for (const auto& w : ind.witness) wit.push_back(w.str());
  for (std::size_t i = 1; i < ind.witness.size(); ++i)
    character.push_back(static_cast<double>(ind.witness[i]));
  ow.detail = {{"witness", wit}, {"relation", "w0 + sum_i w_i alpha_i = 0"}};
  std::size_t n = character.size();
  ow.defect = [character, n](const double* start, const double* x) {
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += character[i] * (x[i] - start[i]);
    return dist_to_int(acc);
  };
  facts.obstruction = ow;
  return facts;
}

//
// circle rotation
//

SystemDescriptor circle_rotation(SymReal alpha) {
  alpha = sym_frac(alpha);
  SystemDescriptor s;
  s.space = circle_space(alpha.registry());
  s.name = "circle-rotation";
  s.params = {{"alpha", alpha.describe()}};
  s.rotation_vector = {alpha};
  double ad = frac_double(alpha.approx());
  s.step = [alpha](const SpacePoint& p) { return circle_point(p.as<CirclePt>().s + alpha); };
  s.inverse = [alpha](const SpacePoint& p) { return circle_point(p.as<CirclePt>().s - alpha); };
  s.step_num = [ad](double* x) { x[0] = wrap_unit(x[0] + ad); };
  s.inverse_num = [ad](double* x) { x[0] = wrap_unit(x[0] - ad); };
  auto facts = rotation_facts(s.rotation_vector);
  s.exact_period = facts.period;
  s.obstruction = facts.obstruction;
  return s;
}

//
// torus rotation
//

SystemDescriptor torus_rotation(std::vector<SymReal> alphas) {
  if (alphas.empty()) throw ConfigError("torus rotation needs at least one coordinate");
  for (auto& a : alphas) a = sym_frac(a);
  std::size_t n = alphas.size();
  const BasisRegistry* reg = nullptr;
  for (const auto& a : alphas)
    if (a.registry()) reg = a.registry();
  SystemDescriptor s;
  s.space = torus_space(reg, n);
  s.name = "torus-rotation";
  s.params = {{"alphas", describe_all(alphas)}};
  s.rotation_vector = alphas;
  std::vector<double> ad;
  for (const auto& a : alphas) ad.push_back(frac_double(a.approx()));
  s.step = [alphas, n](const SpacePoint& p) {
    const auto& c = p.as<TorusPt>().c;
    if (c.size() != n) throw Error("torus point dimension mismatch");
    std::vector<SymReal> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(c[i] + alphas[i]);
    return torus_point(std::move(out));
  };
  s.inverse = [alphas, n](const SpacePoint& p) {
    const auto& c = p.as<TorusPt>().c;
    std::vector<SymReal> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(c[i] - alphas[i]);
    return torus_point(std::move(out));
  };
  s.step_num = [ad, n](double* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = wrap_unit(x[i] + ad[i]);
  };
  s.inverse_num = [ad, n](double* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = wrap_unit(x[i] - ad[i]);
  };
  auto facts = rotation_facts(alphas);
  s.exact_period = facts.period;
  s.obstruction = facts.obstruction;
  return s;
}

//
// odometer (add one with carry, least significant digit first; carry past
// depth wraps, so the model is the cyclic group of order base^depth)
//

SystemDescriptor odometer(std::uint32_t base, std::size_t depth) {
  if (base < 2 || depth < 1) throw ConfigError("odometer needs base >= 2, depth >= 1");
  SystemDescriptor s;
  s.space = cantor_space(base, depth);
  s.name = "odometer";
  s.params = {{"base", base}, {"depth", depth}};
  s.step = [base, depth](const SpacePoint& p) {
    CantorPt w = p.as<CantorPt>();
    for (std::size_t i = 0; i < depth; ++i) {
      if (w.w[i] + 1u < base) {
        ++w.w[i];
        return SpacePoint{std::move(w)};
      }
      w.w[i] = 0;
    }
    return SpacePoint{std::move(w)};  // full carry wraps to all zeros
  };
  s.inverse = [base, depth](const SpacePoint& p) {
    CantorPt w = p.as<CantorPt>();
    for (std::size_t i = 0; i < depth; ++i) {
      if (w.w[i] > 0) {
        --w.w[i];
        return SpacePoint{std::move(w)};
      }
      w.w[i] = static_cast<std::uint8_t>(base - 1);
    }
    return SpacePoint{std::move(w)};
  };
  s.step_num = [base, depth](double* x) {
    for (std::size_t i = 0; i < depth; ++i) {
      if (x[i] + 1.5 < base) {
        x[i] += 1.0;
        return;
      }
      x[i] = 0.0;
    }
  };
  s.inverse_num = [base, depth](double* x) {
    for (std::size_t i = 0; i < depth; ++i) {
      if (x[i] > 0.5) {
        x[i] -= 1.0;
        return;
      }
      x[i] = static_cast<double>(base - 1);
    }
  };
  Int period = 1;
  for (std::size_t i = 0; i < depth; ++i) period *= base;
  s.exact_period = period;
  return s;
}

//
// suspension time-t map on the mapping torus of h
//

SystemDescriptor suspension_time_t(const SystemDescriptor& h, SymReal t) {
  if (h.space.kind != SpaceKind::Cantor)
    throw ConfigError("suspension base must act on cantor words");
  if (!h.inverse || !h.inverse_num)
    throw ConfigError("suspension needs an invertible base map");
  std::uint32_t base = h.space.params.at("base").get<std::uint32_t>();
  std::size_t depth = h.space.params.at("depth").get<std::size_t>();
  SystemDescriptor s;
  s.space = solenoid_space(base, depth, h.step_num, h.inverse_num);
  s.name = "suspension-time-t";
  s.params = {{"t", t.describe()}, {"base", h.params}};
  auto hstep = h.step;
  auto hinv = h.inverse;
  s.step = [hstep, hinv, t](const SpacePoint& p) {
    const auto& sp = p.as<SolenoidPt>();
    SymReal u = t + sp.s;
    Int k = sym_floor(u);
    SymReal fr = u - SymReal(Rational(k));
    SpacePoint y{sp.y};
    if (k > 1000000 || k < -1000000) throw Error("suspension power too large");
    long kk = static_cast<long>(k);
    for (long i = 0; i < kk; ++i) y = hstep(y);
    for (long i = 0; i > kk; --i) y = hinv(y);
    return solenoid_point(y.as<CantorPt>(), fr);
  };
  auto hstep_num = h.step_num;
  auto hinv_num = h.inverse_num;
  double td = t.approx();
  s.step_num = [hstep_num, hinv_num, td, depth](double* x) {
    double u = td + x[depth];
    double k = std::floor(u);
    long kk = static_cast<long>(k);
    for (long i = 0; i < kk; ++i) hstep_num(x);
    for (long i = 0; i > kk; --i) hinv_num(x);
    x[depth] = std::min(std::nextafter(1.0, 0.0), std::max(0.0, u - k));
  };
  s.inverse = [hstep, hinv, t](const SpacePoint& p) {
    const auto& sp = p.as<SolenoidPt>();
    SymReal u = sp.s - t;
    Int k = sym_floor(u);
    SymReal fr = u - SymReal(Rational(k));
    SpacePoint y{sp.y};
    long kk = static_cast<long>(k);
    for (long i = 0; i < kk; ++i) y = hstep(y);
    for (long i = 0; i > kk; --i) y = hinv(y);
    return solenoid_point(y.as<CantorPt>(), fr);
  };
  s.inverse_num = [hstep_num, hinv_num, td, depth](double* x) {
    double u = x[depth] - td;
    double k = std::floor(u);
    long kk = static_cast<long>(k);
    for (long i = 0; i < kk; ++i) hstep_num(x);
    for (long i = 0; i > kk; --i) hinv_num(x);
    x[depth] = std::min(std::nextafter(1.0, 0.0), std::max(0.0, u - k));
  };
  if (t.is_rational() && h.exact_period) {
    Rational tr = t.rational_part();
    Int q = denominator(tr);
    Int p = numerator(tr);
    if (p < 0) p = -p;
    Int bd = *h.exact_period;
    Int g = p == 0 ? bd : boost::multiprecision::gcd(p % bd == 0 ? bd : p, bd);
    s.exact_period = q * (bd / g);
  }
  return s;
}

//
// Denjoy blow-up of a circle rotation: the orbit of 0 within |n| <= window is
// doubled into (pos, minus)/(pos, plus), with gap lengths c(1-c)2^{-|n|}
// inserted by the order embedding e.
//

DenjoySystem denjoy_system(SymReal alpha, Rational gap_scale, long window) {
  alpha = sym_frac(alpha);
  if (alpha.is_rational()) throw ConfigError("denjoy blow-up needs an irrational rotation");
  if (!(gap_scale > 0 && gap_scale < 1)) throw ConfigError("gap scale must be in (0,1)");
  if (window < 1) throw ConfigError("window must be positive");

  auto model = std::make_shared<DenjoyModel>();
  model->reg = alpha.registry();
  model->alpha = alpha;
  model->c = gap_scale;
  model->W = window;
  model->alpha_d = frac_double(alpha.approx());

  std::vector<std::pair<double, long>> order;
  for (long n = -window; n <= window; ++n)
    order.emplace_back(frac_double(alpha.scaled(Rational(n)).approx()), n);
  std::sort(order.begin(), order.end());
  double L = 0;
  for (auto& [pos, n] : order) {
    model->xs_sorted.push_back(pos);
    model->idx_sorted.push_back(n);
    double g = to_double(model->gap_len(n));
    model->gap_sorted.push_back(g);
    L += g;
  }
  model->L = L;
  model->gap_prefix.assign(1, 0.0);
  for (double g : model->gap_sorted) model->gap_prefix.push_back(model->gap_prefix.back() + g);

  SystemDescriptor s;
  s.space = denjoy_space(model);
  s.name = "denjoy";
  s.params = {{"alpha", alpha.describe()},
              {"gap_scale", to_double(gap_scale)},
              {"window", window}};
  s.step = [model, alpha, window](const SpacePoint& p) {
    const auto& dp = p.as<DenjoyPt>();
    SymReal pos = sym_frac(dp.pos + alpha);
    if (dp.side == Side::none) return SpacePoint{DenjoyPt{std::move(pos), Side::none, 0}};
    long idx = dp.idx + 1;
    if (idx > window) return SpacePoint{DenjoyPt{std::move(pos), Side::none, 0}};
    return SpacePoint{DenjoyPt{std::move(pos), dp.side, idx}};
  };
  s.inverse = [model, alpha, window](const SpacePoint& p) {
    const auto& dp = p.as<DenjoyPt>();
    SymReal pos = sym_frac(dp.pos - alpha);
    if (dp.side == Side::none) return SpacePoint{DenjoyPt{std::move(pos), Side::none, 0}};
    long idx = dp.idx - 1;
    if (idx < -window) return SpacePoint{DenjoyPt{std::move(pos), Side::none, 0}};
    return SpacePoint{DenjoyPt{std::move(pos), dp.side, idx}};
  };
  auto advance = [model, window](double* x, int dir) {
    int side = static_cast<int>(std::lround(x[2]));
    long idx = std::lround(x[3]);
    if (side != 0) {
      idx += dir;
      if (idx > window || idx < -window) {
        side = 0;
        idx = 0;
        x[1] = wrap_unit(x[1] + dir * model->alpha_d);
      } else {
        auto it = std::find(model->idx_sorted.begin(), model->idx_sorted.end(), idx);
        x[1] = model->xs_sorted[static_cast<std::size_t>(it - model->idx_sorted.begin())];
      }
    } else {
      x[1] = wrap_unit(x[1] + dir * model->alpha_d);
    }
    x[2] = side;
    x[3] = static_cast<double>(idx);
    x[0] = model->embed_e(x[1], side, idx);
  };
  s.step_num = [advance](double* x) { advance(x, 1); };
  s.inverse_num = [advance](double* x) { advance(x, -1); };

  FactorMap fm;
  fm.source = std::make_shared<SystemDescriptor>(s);
  fm.target = std::make_shared<SystemDescriptor>(circle_rotation(alpha));
  fm.project = [](const SpacePoint& p) { return circle_point(p.as<DenjoyPt>().pos); };
  fm.fiber_probe = [model](const SpacePoint& target, double) {
    SymReal pos = target.as<CirclePt>().s;
    std::vector<SpacePoint> out;
    if (auto idx = model->marked_index(pos)) {
      out.push_back(SpacePoint{DenjoyPt{pos, Side::minus, *idx}});
      out.push_back(SpacePoint{DenjoyPt{pos, Side::plus, *idx}});
    } else {
      out.push_back(SpacePoint{DenjoyPt{pos, Side::none, 0}});
    }
    return out;
  };
  return DenjoySystem{std::move(s), std::move(fm), model};
}

//
// left translation on unit quaternions
//

namespace {

std::array<double, 4> quat_mul(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

}  // namespace

SystemDescriptor s3_translation(double gw, double gx, double gy, double gz) {
  SpacePoint gp = quat_point(gw, gx, gy, gz);
  std::array<double, 4> g = gp.as<QuatPt>().q;
  std::array<double, 4> ginv = {g[0], -g[1], -g[2], -g[3]};
  SystemDescriptor s;
  s.space = s3_space();
  s.name = "s3-translation";
  s.params = {{"g", json(g)}};
  s.step = [g](const SpacePoint& p) {
    auto r = quat_mul(g, p.as<QuatPt>().q);
    return quat_point(r[0], r[1], r[2], r[3]);
  };
  s.inverse = [ginv](const SpacePoint& p) {
    auto r = quat_mul(ginv, p.as<QuatPt>().q);
    return quat_point(r[0], r[1], r[2], r[3]);
  };
  auto apply = [](const std::array<double, 4>& m, double* x) {
    std::array<double, 4> q = {x[0], x[1], x[2], x[3]};
    auto r = quat_mul(m, q);
    double n = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
    for (int i = 0; i < 4; ++i) x[i] = r[i] / n;
  };
  s.step_num = [g, apply](double* x) { apply(g, x); };
  s.inverse_num = [ginv, apply](double* x) { apply(ginv, x); };

  double vnorm = std::sqrt(g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
  if (vnorm < 1e-12) {
    ObstructionWitness ow;
    ow.kind = ObstructionWitness::Kind::FiniteOrder;
    Int period = g[0] > 0 ? 1 : 2;
    ow.detail = {{"period", period.str()}};
    s.exact_period = period;
    s.obstruction = ow;
    return s;
  }
  std::array<double, 4> axis = {0.0, g[1] / vnorm, g[2] / vnorm, g[3] / vnorm};
  ObstructionWitness ow;
  ow.kind = ObstructionWitness::Kind::S3Axis;
  ow.detail = {{"axis", json(axis)},
               {"invariant", "distance to the plane spanned by the start's translation circle"}};
  ow.defect = [axis](const double* start, const double* x) {
    std::array<double, 4> e = {start[0], start[1], start[2], start[3]};
    auto u = quat_mul(axis, e);
    double pe = x[0] * e[0] + x[1] * e[1] + x[2] * e[2] + x[3] * e[3];
    double pu = x[0] * u[0] + x[1] * u[1] + x[2] * u[2] + x[3] * u[3];
    return std::sqrt(std::max(0.0, 1.0 - pe * pe - pu * pu));
  };
  s.obstruction = ow;
  return s;
}

//
// the two-circles skew map: X = {0,1} x Circle, F(x,y) = (T(x), S_x(y)) with
// T flipping the circle label (adding alpha on return) and S_x applying the
// same flip-and-add-beta exactly when x sits on circle 1
//

SystemDescriptor two_circles_skew(SymReal alpha, SymReal beta) {
  alpha = sym_frac(alpha);
  beta = sym_frac(beta);
  const BasisRegistry* reg = alpha.registry() ? alpha.registry() : beta.registry();
  SpaceDescriptor x_space = product_space(finite_space(2), circle_space(reg));
  SystemDescriptor s;
  s.space = product_space(x_space, x_space);
  s.name = "two-circles-skew";
  s.params = {{"alpha", alpha.describe()}, {"beta", beta.describe()}};
  auto tmap = [alpha](const SpacePoint& x) {
    const auto& xp = x.as<ProductPt>();
    long j = xp.a->as<FinitePt>().i;
    if (j == 0) return product_point(finite_point(1, 2), *xp.b);
    return product_point(finite_point(0, 2), circle_point(xp.b->as<CirclePt>().s + alpha));
  };
  auto smap = [beta](const SpacePoint& y) {
    const auto& yp = y.as<ProductPt>();
    long i = yp.a->as<FinitePt>().i;
    return product_point(finite_point(1 - i, 2), circle_point(yp.b->as<CirclePt>().s + beta));
  };
  s.step = [tmap, smap](const SpacePoint& p) {
    const auto& pp = p.as<ProductPt>();
    long j = pp.a->as<ProductPt>().a->as<FinitePt>().i;
    SpacePoint x2 = tmap(*pp.a);
    SpacePoint y2 = j == 1 ? smap(*pp.b) : *pp.b;
    return product_point(std::move(x2), std::move(y2));
  };
  s.inverse = [alpha, beta](const SpacePoint& p) {
    const auto& pp = p.as<ProductPt>();
    const auto& xp = pp.a->as<ProductPt>();
    long j2 = xp.a->as<FinitePt>().i;
    SpacePoint x1 = j2 == 1
                        ? product_point(finite_point(0, 2), *xp.b)
                        : product_point(finite_point(1, 2),
                                        circle_point(xp.b->as<CirclePt>().s - alpha));
    long j1 = j2 == 1 ? 0 : 1;
    SpacePoint y1 = *pp.b;
    if (j1 == 1) {
      const auto& yp = pp.b->as<ProductPt>();
      y1 = product_point(finite_point(1 - yp.a->as<FinitePt>().i, 2),
                         circle_point(yp.b->as<CirclePt>().s - beta));
    }
    return product_point(std::move(x1), std::move(y1));
  };
  double ad = frac_double(alpha.approx());
  double bd = frac_double(beta.approx());
  s.step_num = [ad, bd](double* x) {
    if (x[0] < 0.5) {
      x[0] = 1.0;
    } else {
      x[0] = 0.0;
      x[1] = wrap_unit(x[1] + ad);
      x[2] = x[2] < 0.5 ? 1.0 : 0.0;
      x[3] = wrap_unit(x[3] + bd);
    }
  };
  s.inverse_num = [ad, bd](double* x) {
    if (x[0] > 0.5) {
      x[0] = 0.0;
    } else {
      x[0] = 1.0;
      x[1] = wrap_unit(x[1] - ad);
      x[2] = x[2] < 0.5 ? 1.0 : 0.0;
      x[3] = wrap_unit(x[3] - bd);
    }
  };
  if (alpha.is_rational() && beta.is_rational()) {
    Int m = boost::multiprecision::lcm(
        Int(denominator(sym_frac(alpha.scaled(2)).rational_part())),
        Int(denominator(sym_frac(beta.scaled(2)).rational_part())));
    s.exact_period = 4 * m;
  }
  return s;
}

SystemDescriptor two_circles_base(SymReal alpha) {
  alpha = sym_frac(alpha);
  SystemDescriptor s;
  s.space = product_space(finite_space(2), circle_space(alpha.registry()));
  s.name = "two-circles-base";
  s.params = {{"alpha", alpha.describe()}};
  s.step = [alpha](const SpacePoint& p) {
    const auto& pp = p.as<ProductPt>();
    long j = pp.a->as<FinitePt>().i;
    if (j == 0) return product_point(finite_point(1, 2), *pp.b);
    return product_point(finite_point(0, 2), circle_point(pp.b->as<CirclePt>().s + alpha));
  };
  s.inverse = [alpha](const SpacePoint& p) {
    const auto& pp = p.as<ProductPt>();
    long j = pp.a->as<FinitePt>().i;
    if (j == 1) return product_point(finite_point(0, 2), *pp.b);
    return product_point(finite_point(1, 2), circle_point(pp.b->as<CirclePt>().s - alpha));
  };
  double ad = frac_double(alpha.approx());
  s.step_num = [ad](double* x) {
    if (x[0] < 0.5) {
      x[0] = 1.0;
    } else {
      x[0] = 0.0;
      x[1] = wrap_unit(x[1] + ad);
    }
  };
  s.inverse_num = [ad](double* x) {
    if (x[0] > 0.5) {
      x[0] = 0.0;
    } else {
      x[0] = 1.0;
      x[1] = wrap_unit(x[1] - ad);
    }
  };
  if (alpha.is_rational()) {
    Int q(denominator(alpha.rational_part()));
    s.exact_period = 2 * q;
  }
  return s;
}

//
// finite cyclic permutation
//

SystemDescriptor cyclic_system(long k) {
  if (k < 1) throw ConfigError("cyclic system needs at least one point");
  SystemDescriptor s;
  s.space = finite_space(k);
  s.name = "cyclic";
  s.params = {{"k", k}};
  s.step = [k](const SpacePoint& p) { return finite_point((p.as<FinitePt>().i + 1) % k, k); };
  s.inverse = [k](const SpacePoint& p) {
    return finite_point((p.as<FinitePt>().i + k - 1) % k, k);
  };
  s.step_num = [k](double* x) { x[0] = x[0] + 1.5 > k ? 0.0 : x[0] + 1.0; };
  s.inverse_num = [k](double* x) { x[0] = x[0] < 0.5 ? static_cast<double>(k - 1) : x[0] - 1.0; };
  s.exact_period = Int(k);
  return s;
}

SystemDescriptor identity_system(SpaceDescriptor space) {
  SystemDescriptor s;
  s.space = std::move(space);
  s.name = "identity";
  s.params = {{"map", "identity"}};
  s.step = [](const SpacePoint& p) { return p; };
  s.inverse = s.step;
  s.step_num = [](double*) {};
  s.inverse_num = s.step_num;
  s.exact_period = Int(1);
  ObstructionWitness ow;
  ow.kind = ObstructionWitness::Kind::FiniteOrder;
  ow.detail = {{"period", "1"}};
  s.obstruction = ow;
  return s;
}

SystemDescriptor torus_translation_numeric(std::size_t n, std::vector<double> shift) {
  if (shift.size() != n) throw ConfigError("shift dimension mismatch");
  SystemDescriptor s;
  s.space = torus_space(nullptr, n);
  s.name = "torus-translation-numeric";
  s.params = {{"shift", shift}};
  for (auto& v : shift) v = frac_double(v);
  s.step = [](const SpacePoint&) -> SpacePoint {
    throw Error("numeric-only translation has no symbolic step");
  };
  s.step_num = [shift, n](double* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = wrap_unit(x[i] + shift[i]);
  };
  s.inverse_num = [shift, n](double* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = wrap_unit(x[i] - shift[i]);
  };
  return s;
}

}  // namespace minprod
