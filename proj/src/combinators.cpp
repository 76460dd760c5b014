#include "minprod/combinators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"

namespace minprod {

namespace {

constexpr std::size_t kMaxFiberDim = 8;

// Points in the space, when the space is provably finite (finite and
// truncated-Cantor components); nullopt means infinite or unknown.
std::optional<Int> space_point_count(const json& params) {
  std::string kind = params.value("space", "");
  if (kind == "finite") return Int(params.at("cardinality").get<long>());
  if (kind == "cantor" || kind == "solenoid-base") {
    Int n = 1;
    auto base = params.at("base").get<long>();
    auto depth = params.at("depth").get<long>();
    for (long i = 0; i < depth; ++i) n *= base;
    return kind == "cantor" ? std::optional<Int>(n) : std::nullopt;
  }
  if (kind == "product") {
    auto l = space_point_count(params.at("left"));
    auto r = space_point_count(params.at("right"));
    if (l && r) return *l * *r;
  }
  return std::nullopt;
}

// FiniteOrder witness whose defect is the distance to the enumerated orbit
// of start; only small periods get a defect function (larger ones are the
// business of exact orbit enumeration, not pointwise validation).
ObstructionWitness finite_order_witness(const Int& period, std::function<void(double*)> step_num,
                                        std::function<double(const double*, const double*)> metric,
                                        std::size_t dim) {
  ObstructionWitness ow;
  ow.kind = ObstructionWitness::Kind::FiniteOrder;
  ow.detail = {{"period", period.str()}};
  if (period <= 4096 && step_num && metric) {
    long p = static_cast<long>(period);
    ow.defect = [step_num, metric, dim, p](const double* start, const double* x) {
      std::vector<double> buf(start, start + dim);
      double best = metric(buf.data(), x);
      for (long i = 1; i < p; ++i) {
        step_num(buf.data());
        best = std::min(best, metric(buf.data(), x));
      }
      return best;
    };
  }
  return ow;
}

std::vector<SymReal> point_coords(const SpacePoint& p) {
  if (p.kind() == SpaceKind::Circle) return {p.as<CirclePt>().s};
  return p.as<TorusPt>().c;
}

SpacePoint base_point_from(const std::vector<SymReal>& c, std::size_t bd, SpaceKind kind) {
  if (kind == SpaceKind::Circle) return circle_point(c[0]);
  return torus_point(std::vector<SymReal>(c.begin(), c.begin() + static_cast<long>(bd)));
}

// arc distance to 0 of a circle coordinate already reduced to [0, 1)
SymReal exact_arc(const SymReal& delta) {
  SymReal alt = SymReal(1) - delta;
  return sym_compare(delta, alt) <= 0 ? delta : alt;
}

}  // namespace

SystemDescriptor direct_product(const SystemDescriptor& a, const SystemDescriptor& b) {
  if (!a.step_num || !b.step_num) throw ConfigError("direct product needs numeric steps");
  SystemDescriptor s;
  s.space = product_space(a.space, b.space);
  s.name = a.name + " x " + b.name;
  s.params = {{"op", "direct-product"},
              {"left", {{"name", a.name}, {"params", a.params}}},
              {"right", {{"name", b.name}, {"params", b.params}}}};
  auto pa = std::make_shared<const SystemDescriptor>(a);
  auto pb = std::make_shared<const SystemDescriptor>(b);
  if (a.step && b.step)
    s.step = [pa, pb](const SpacePoint& p) {
      const auto& pp = p.as<ProductPt>();
      return product_point(pa->step(*pp.a), pb->step(*pp.b));
    };
  if (a.inverse && b.inverse)
    s.inverse = [pa, pb](const SpacePoint& p) {
      const auto& pp = p.as<ProductPt>();
      return product_point(pa->inverse(*pp.a), pb->inverse(*pp.b));
    };
  const std::size_t da = a.space.dim;
  {
    auto fa = a.step_num, fb = b.step_num;
    s.step_num = [fa, fb, da](double* x) {
      fa(x);
      fb(x + da);
    };
  }
  if (a.inverse_num && b.inverse_num) {
    auto fa = a.inverse_num, fb = b.inverse_num;
    s.inverse_num = [fa, fb, da](double* x) {
      fa(x);
      fb(x + da);
    };
  }
  if (a.exact_period && b.exact_period)
    s.exact_period = boost::multiprecision::lcm(*a.exact_period, *b.exact_period);

  if (!a.rotation_vector.empty() && !b.rotation_vector.empty()) {
    s.rotation_vector = a.rotation_vector;
    s.rotation_vector.insert(s.rotation_vector.end(), b.rotation_vector.begin(),
                             b.rotation_vector.end());
    auto facts = rotation_facts(s.rotation_vector);
    if (facts.period) s.exact_period = facts.period;
    s.obstruction = facts.obstruction;
  } else if (s.exact_period) {
    auto count = space_point_count(s.space.params);
    if (!count || *s.exact_period < *count)
      s.obstruction =
          finite_order_witness(*s.exact_period, s.step_num, s.space.metric_num, s.space.dim);
  } else if (a.obstruction) {
    ObstructionWitness ow = *a.obstruction;  // defect reads the leading coordinates as is
    if (!ow.defect && a.exact_period)
      ow = finite_order_witness(*a.exact_period, a.step_num, a.space.metric_num, da);
    ow.detail["factor"] = 0;
    s.obstruction = ow;
  } else if (b.obstruction) {
    ObstructionWitness ow;
    ow.kind = b.obstruction->kind;
    ow.detail = b.obstruction->detail;
    ow.detail["factor"] = 1;
    if (b.obstruction->defect) {
      auto d = b.obstruction->defect;
      ow.defect = [d, da](const double* start, const double* x) {
        return d(start + da, x + da);
      };
    } else if (b.exact_period) {
      auto inner = finite_order_witness(*b.exact_period, b.step_num, b.space.metric_num,
                                        b.space.dim);
      if (inner.defect) {
        auto d = inner.defect;
        ow.defect = [d, da](const double* start, const double* x) {
          return d(start + da, x + da);
        };
      }
    }
    s.obstruction = ow;
  }
  return s;
}

SystemDescriptor skew_product(const SystemDescriptor& base, const Cocycle& f,
                              std::size_t fiber_dim) {
  if (fiber_dim == 0 || fiber_dim != f.dim)
    throw ConfigError("fiber dimension must match the cocycle dimension");
  if (fiber_dim > kMaxFiberDim) throw ConfigError("fiber dimension too large");
  if (!base.step_num || !f.eval_num) throw ConfigError("skew product needs numeric paths");
  const BasisRegistry* reg = nullptr;
  for (const auto& v : base.rotation_vector)
    if (v.registry()) reg = v.registry();
  const bool flat = base.space.kind == SpaceKind::Circle || base.space.kind == SpaceKind::Torus;
  const std::size_t bd = base.space.dim;
  const SpaceKind base_kind = base.space.kind;

  SystemDescriptor s;
  s.space = flat ? torus_space(reg, bd + fiber_dim)
                 : product_space(base.space, torus_space(reg, fiber_dim));
  s.name = base.name + " skew";
  s.params = {{"op", "skew-product"},
              {"base", {{"name", base.name}, {"params", base.params}}},
              {"cocycle", f.description},
              {"fiber_dim", fiber_dim}};
  auto pb = std::make_shared<const SystemDescriptor>(base);
  auto pf = std::make_shared<const Cocycle>(f);

  if (base.step && f.eval_sym) {
    if (flat)
      s.step = [pb, pf, bd, fiber_dim, base_kind](const SpacePoint& p) {
        const auto& t = p.as<TorusPt>();
        SpacePoint y = base_point_from(t.c, bd, base_kind);
        std::vector<SymReal> inc = pf->eval_sym(y);
        std::vector<SymReal> out = point_coords(pb->step(y));
        for (std::size_t c = 0; c < fiber_dim; ++c) out.push_back(t.c[bd + c] + inc[c]);
        return torus_point(std::move(out));
      };
    else
      s.step = [pb, pf, fiber_dim](const SpacePoint& p) {
        const auto& pp = p.as<ProductPt>();
        std::vector<SymReal> inc = pf->eval_sym(*pp.a);
        const auto& z = pp.b->as<TorusPt>().c;
        std::vector<SymReal> out;
        for (std::size_t c = 0; c < fiber_dim; ++c) out.push_back(z[c] + inc[c]);
        return product_point(pb->step(*pp.a), torus_point(std::move(out)));
      };
  }
  if (base.inverse && f.eval_sym) {
    if (flat)
      s.inverse = [pb, pf, bd, fiber_dim, base_kind](const SpacePoint& p) {
        const auto& t = p.as<TorusPt>();
        SpacePoint yp = pb->inverse(base_point_from(t.c, bd, base_kind));
        std::vector<SymReal> inc = pf->eval_sym(yp);
        std::vector<SymReal> out = point_coords(yp);
        for (std::size_t c = 0; c < fiber_dim; ++c) out.push_back(t.c[bd + c] - inc[c]);
        return torus_point(std::move(out));
      };
    else
      s.inverse = [pb, pf, fiber_dim](const SpacePoint& p) {
        const auto& pp = p.as<ProductPt>();
        SpacePoint yp = pb->inverse(*pp.a);
        std::vector<SymReal> inc = pf->eval_sym(yp);
        const auto& z = pp.b->as<TorusPt>().c;
        std::vector<SymReal> out;
        for (std::size_t c = 0; c < fiber_dim; ++c) out.push_back(z[c] - inc[c]);
        return product_point(std::move(yp), torus_point(std::move(out)));
      };
  }
  {
    auto bn = base.step_num;
    auto fn = f.eval_num;
    s.step_num = [bn, fn, bd, fiber_dim](double* x) {
      std::array<double, kMaxFiberDim> inc{};
      fn(x, inc.data());
      bn(x);
      for (std::size_t c = 0; c < fiber_dim; ++c) x[bd + c] = frac_double(x[bd + c] + inc[c]);
    };
  }
  if (base.inverse_num) {
    auto bi = base.inverse_num;
    auto fn = f.eval_num;
    s.inverse_num = [bi, fn, bd, fiber_dim](double* x) {
      bi(x);
      std::array<double, kMaxFiberDim> inc{};
      fn(x, inc.data());
      for (std::size_t c = 0; c < fiber_dim; ++c) x[bd + c] = frac_double(x[bd + c] - inc[c]);
    };
  }
  s.skew_info = SystemDescriptor::SkewInfo{bd, fiber_dim};
  s.skew_base = pb;

  if (f.is_zero) {
    s.exact_period = base.exact_period;
    ObstructionWitness ow;
    ow.kind = ObstructionWitness::Kind::ZeroCocycle;
    ow.detail = {{"fiber_dim", fiber_dim}};
    ow.defect = [bd, fiber_dim](const double* start, const double* x) {
      double worst = 0.0;
      for (std::size_t c = 0; c < fiber_dim; ++c)
        worst = std::max(worst, dist_to_int(x[bd + c] - start[bd + c]));
      return worst;
    };
    s.obstruction = ow;
  } else if (f.const_value && !base.rotation_vector.empty()) {
    s.rotation_vector = base.rotation_vector;
    for (const auto& c : *f.const_value) s.rotation_vector.push_back(sym_frac(c));
    auto facts = rotation_facts(s.rotation_vector);
    if (facts.period) s.exact_period = facts.period;
    s.obstruction = facts.obstruction;
  } else if (f.const_value && base.exact_period) {
    bool all_rational = true;
    Int q = 1;
    for (const auto& c : *f.const_value) {
      if (!c.is_rational()) {
        all_rational = false;
        break;
      }
      q = boost::multiprecision::lcm(q, Int(denominator(sym_frac(c).rational_part())));
    }
    if (all_rational) {
      Int period = boost::multiprecision::lcm(*base.exact_period, q);
      s.exact_period = period;
      s.obstruction = finite_order_witness(period, s.step_num, s.space.metric_num, s.space.dim);
    }
  }
  return s;
}

SystemDescriptor klein_quotient(const SystemDescriptor& p) {
  if (p.space.kind != SpaceKind::Torus || p.space.dim != 2)
    throw ConfigError("klein quotient needs a system on the 2-torus");
  auto pp = std::make_shared<const SystemDescriptor>(p);
  auto iota = [](const SpacePoint& q) {
    const auto& t = q.as<TorusPt>();
    return torus_point({t.c[0] + SymReal(Rational(1, 2)), -t.c[1]});
  };
  if (p.step) {
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        SpacePoint q = torus_point({SymReal(Rational(i, 8)), SymReal(Rational(j, 8))});
        SpacePoint lhs = pp->step(iota(q));
        SpacePoint rhs = iota(pp->step(q));
        if (!exactly_equal(lhs, rhs))
          throw EquivarianceViolation(
              "step does not commute with the half-turn involution at " +
              canonical_dump(point_to_json(q)) + ": " + canonical_dump(point_to_json(lhs)) +
              " vs " + canonical_dump(point_to_json(rhs)));
      }
  }
  {
    const int m = 128;
    double worst = 0.0, wx = 0.0, wz = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double x = i / static_cast<double>(m), z = j / static_cast<double>(m);
        double u[2] = {frac_double(x + 0.5), frac_double(-z)};
        pp->step_num(u);
        double v[2] = {x, z};
        pp->step_num(v);
        double w[2] = {frac_double(v[0] + 0.5), frac_double(-v[1])};
        double d = std::max(arc_dist(u[0], w[0]), arc_dist(u[1], w[1]));
        if (d > worst) {
          worst = d;
          wx = x;
          wz = z;
        }
      }
    if (worst > 1e-12)
      throw EquivarianceViolation("numeric equivariance defect " + std::to_string(worst) +
                                  " at (" + std::to_string(wx) + ", " + std::to_string(wz) + ")");
  }

  const BasisRegistry* reg = nullptr;
  for (const auto& v : p.rotation_vector)
    if (v.registry()) reg = v.registry();
  SystemDescriptor s;
  s.space = klein_space(reg);
  s.name = "klein(" + p.name + ")";
  s.params = {{"op", "klein-quotient"}, {"base", {{"name", p.name}, {"params", p.params}}}};
  if (p.step)
    s.step = [pp](const SpacePoint& q) {
      const auto& kp = q.as<KleinPt>();
      SpacePoint img = pp->step(torus_point({kp.g, kp.z}));
      const auto& t = img.as<TorusPt>();
      return klein_point(t.c[0], t.c[1]);
    };
  if (p.inverse)
    s.inverse = [pp](const SpacePoint& q) {
      const auto& kp = q.as<KleinPt>();
      SpacePoint img = pp->inverse(torus_point({kp.g, kp.z}));
      const auto& t = img.as<TorusPt>();
      return klein_point(t.c[0], t.c[1]);
    };
  auto canon = [](double* x) {
    x[0] = frac_double(x[0]);
    x[1] = frac_double(x[1]);
    if (x[0] >= 0.5) {
      x[0] -= 0.5;
      x[1] = frac_double(-x[1]);
    }
  };
  {
    auto pn = p.step_num;
    s.step_num = [pn, canon](double* x) {
      pn(x);
      canon(x);
    };
  }
  if (p.inverse_num) {
    auto pn = p.inverse_num;
    s.inverse_num = [pn, canon](double* x) {
      pn(x);
      canon(x);
    };
  }
  return s;
}

Report verify_factor(const FactorMap& fm, std::size_t samples, long horizon,
                     const FactorVerifyOptions& opts) {
  if (!fm.source || !fm.target || !fm.project) throw ConfigError("factor map is incomplete");
  const SystemDescriptor& src = *fm.source;
  const SystemDescriptor& tgt = *fm.target;
  const bool stepped = static_cast<bool>(src.step) && static_cast<bool>(tgt.step);

  double max_defect = 0.0;
  bool all_exact = true;
  long truncated = 0;
  json worst = nullptr;
  if (stepped) {
    std::vector<SpacePoint> starts = src.space.sampler(samples, opts.seed);
    for (const auto& start : starts) {
      SpacePoint y = start;
      for (long t = 0; t < horizon; ++t) {
        try {
          SpacePoint y1 = src.step(y);
          SpacePoint via_src = fm.project(y1);
          SpacePoint via_tgt = tgt.step(fm.project(y));
          if (!exactly_equal(via_src, via_tgt)) {
            all_exact = false;
            double d = tgt.space.metric(via_src, via_tgt);
            if (d > max_defect) {
              max_defect = d;
              worst = {{"point", point_to_json(y)}, {"time", t}};
            }
          }
          y = std::move(y1);
        } catch (const WindowOverflow&) {
          ++truncated;
          break;
        }
      }
    }
  }

  json histogram = json::object();
  std::size_t net_count = 0, singleton = 0, empty = 0;
  double max_probe_err = 0.0;
  if (fm.fiber_probe) {
    NetIndexer net = tgt.space.make_net(opts.net_eps);
    net_count = net.points.size();
    for (const auto& q : net.points) {
      std::vector<SpacePoint> fiber = fm.fiber_probe(q, opts.probe_resolution);
      std::string key = std::to_string(fiber.size());
      histogram[key] = histogram.value(key, 0) + 1;
      if (fiber.size() == 1) ++singleton;
      if (fiber.empty()) ++empty;
      std::vector<double> qe = tgt.space.embed(q);
      for (const auto& fp : fiber) {
        std::vector<double> pe = tgt.space.embed(fm.project(fp));
        max_probe_err = std::max(max_probe_err, tgt.space.metric_num(pe.data(), qe.data()));
      }
    }
  }

  double fraction = net_count ? static_cast<double>(singleton) / static_cast<double>(net_count)
                              : 0.0;
  Report r;
  r.op = "verify-factor";
  r.params = {{"samples", samples},
              {"horizon", horizon},
              {"net_eps", opts.net_eps},
              {"resolution", opts.probe_resolution},
              {"seed", opts.seed}};
  r.evidence = {{"max_defect", max_defect},
                {"exact", stepped && all_exact},
                {"fiber_histogram", histogram},
                {"singleton_fraction", fraction},
                {"almost_1_1", net_count > 0 && fraction >= opts.singleton_fraction},
                {"max_probe_error", max_probe_err},
                {"truncated_orbits", truncated},
                {"net_points", net_count}};
  if (max_defect > opts.defect_tol) {
    r.verdict = Verdict::fail;
    r.witness = worst;
  } else if (!stepped || empty > 0) {
    r.verdict = Verdict::inconclusive;
  } else {
    r.verdict = Verdict::pass;
  }
  return r;
}

FactorMap identity_factor_map(const SystemDescriptor& s) {
  auto p = std::make_shared<const SystemDescriptor>(s);
  FactorMap fm;
  fm.source = p;
  fm.target = p;
  fm.project = [](const SpacePoint& q) { return q; };
  fm.fiber_probe = [](const SpacePoint& q, double) { return std::vector<SpacePoint>{q}; };
  return fm;
}

FactorMap product_factor_map(const SystemDescriptor& a, const SystemDescriptor& b, int which) {
  if (which != 0 && which != 1) throw ConfigError("factor index must be 0 or 1");
  FactorMap fm;
  fm.source = std::make_shared<const SystemDescriptor>(direct_product(a, b));
  fm.target = std::make_shared<const SystemDescriptor>(which == 0 ? a : b);
  fm.project = [which](const SpacePoint& q) {
    const auto& pp = q.as<ProductPt>();
    return which == 0 ? *pp.a : *pp.b;
  };
  auto other = std::make_shared<const SpaceDescriptor>(which == 0 ? b.space : a.space);
  fm.fiber_probe = [which, other](const SpacePoint& q, double res) {
    std::vector<SpacePoint> out;
    for (auto& w : other->net(res))
      out.push_back(which == 0 ? product_point(q, std::move(w)) : product_point(std::move(w), q));
    return out;
  };
  return fm;
}

bool DiscFamily::member(const SpacePoint& p) const {
  const auto& t = p.as<TorusPt>();
  if (t.c.size() != 2) throw ConfigError("membership oracle expects torus-2 points");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto& c = centers[i].as<TorusPt>();
    SymReal a0 = exact_arc(sym_frac(t.c[0] - c.c[0]));
    SymReal a1 = exact_arc(sym_frac(t.c[1] - c.c[1]));
    const SymReal& dist = sym_compare(a0, a1) >= 0 ? a0 : a1;
    if (sym_compare(dist, SymReal(radii[i])) < 0) return false;
  }
  return true;
}

double DiscFamily::distance_to_union_num(const double* p) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < radii_num.size(); ++i) {
    double d = space.metric_num(p, center_coords.data() + 2 * i) - radii_num[i];
    best = std::min(best, d);
  }
  return best;
}

bool DiscFamily::member_num(const double* p) const { return distance_to_union_num(p) >= 0.0; }

Report DiscFamily::density_evidence(std::size_t grid_per_side) const {
  if (grid_per_side == 0) throw ConfigError("density grid must be nonempty");
  const double mesh = 1.0 / static_cast<double>(grid_per_side);
  double sup = 0.0;
  double wx = 0.0, wz = 0.0;
  for (std::size_t i = 0; i < grid_per_side; ++i)
    for (std::size_t j = 0; j < grid_per_side; ++j) {
      double p[2] = {static_cast<double>(i) * mesh, static_cast<double>(j) * mesh};
      double d = distance_to_union_num(p);
      if (d >= 0.0 && d > sup) {
        sup = d;
        wx = p[0];
        wz = p[1];
      }
    }
  Report r;
  r.op = "disc-density";
  r.params = {{"grid_per_side", grid_per_side}, {"discs", radii_num.size()}};
  r.evidence = {{"mesh", mesh},
                {"sup_member_distance", sup},
                {"worst_point", {wx, wz}}};
  r.verdict = sup <= mesh + 1e-12 ? Verdict::pass : Verdict::inconclusive;
  return r;
}

DiscFamily scurve_family(const std::vector<SymReal>& alpha2, const Rational& r0, long W) {
  if (alpha2.size() != 2) throw ConfigError("disc family needs two rotation coordinates");
  if (W < 0) throw ConfigError("window must be nonnegative");
  if (!(r0 > 0)) throw ConfigError("base radius must be positive");
  Independence ind = rational_independence(alpha2);
  if (!ind.independent) {
    std::vector<std::string> wit;
    for (const auto& w : ind.witness) wit.push_back(w.str());
    throw FactorNotMinimal("the center orbit's rotation is not minimal", 0, std::move(wit));
  }
  const BasisRegistry* reg = nullptr;
  for (const auto& v : alpha2)
    if (v.registry()) reg = v.registry();

  DiscFamily fam;
  fam.space = torus_space(reg, 2);
  fam.W = W;
  for (long n = -W; n <= W; ++n) {
    fam.centers.push_back(torus_point(
        {sym_frac(alpha2[0].scaled(Rational(n))), sym_frac(alpha2[1].scaled(Rational(n)))}));
    Rational r = r0;
    for (long i = 0; i < std::labs(n); ++i) r /= 2;
    fam.radii.push_back(r);
  }
  for (const auto& c : fam.centers) {
    std::vector<double> e = fam.space.embed(c);
    fam.center_coords.insert(fam.center_coords.end(), e.begin(), e.end());
  }
  for (const auto& r : fam.radii) fam.radii_num.push_back(static_cast<double>(r));

  std::vector<SymReal> dist_by_diff;  // index d - 1 holds the center distance at index gap d
  for (long d = 1; d <= 2 * W; ++d) {
    SymReal a0 = exact_arc(sym_frac(alpha2[0].scaled(Rational(d))));
    SymReal a1 = exact_arc(sym_frac(alpha2[1].scaled(Rational(d))));
    dist_by_diff.push_back(sym_compare(a0, a1) >= 0 ? a0 : a1);
  }
  for (long n = -W; n <= W; ++n)
    for (long m = n + 1; m <= W; ++m) {
      const SymReal& dist = dist_by_diff[static_cast<std::size_t>(m - n - 1)];
      Rational sum = fam.radii[static_cast<std::size_t>(fam.slot(n))] +
                     fam.radii[static_cast<std::size_t>(fam.slot(m))];
      if (sym_compare(dist, SymReal(sum)) <= 0)
        throw DisjointnessViolation("discs at orbit indices " + std::to_string(n) + " and " +
                                        std::to_string(m) +
                                        " are not disjoint; reduce the base radius",
                                    n, m);
    }
  return fam;
}

}  // namespace minprod
