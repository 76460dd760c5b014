#include "minprod/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"

namespace minprod {

namespace {

constexpr double kDefectTol = 1e-6;
constexpr long kDefectValidationSteps = 2000;

json ball_json(const NetIndexer& net, std::size_t idx) {
  json b;
  b["center"] = std::vector<double>(net.center(idx), net.center(idx) + net.dim);
  b["radius"] = net.eps;
  b["index"] = idx;
  return b;
}

// Coverage scan shared by the minimality and fiber checks: walks the numeric
// orbit of each start, marking every net ball the orbit enters. Stops a start
// early when the net is fully covered or no new ball has appeared for `stall`
// steps. The witness sample is the first start that fails to cover; its
// bitmap drives witness-ball selection.
struct ScanCoreOut {
  std::vector<double> fractions;
  std::size_t worst = 0;
  std::size_t witness_sample = static_cast<std::size_t>(-1);
  std::vector<char> witness_covered;
  std::vector<double> witness_start;
  long witness_steps = 0;
  bool all_covered = true;
};

ScanCoreOut scan_core(const std::function<void(double*)>& step_num, const NetIndexer& net,
                      const std::vector<std::vector<double>>& starts, long horizon, long stall) {
  ScanCoreOut out;
  const std::size_t N = net.size();
  std::vector<char> covered(N);
  std::vector<std::size_t> idxs;
  for (std::size_t si = 0; si < starts.size(); ++si) {
    std::fill(covered.begin(), covered.end(), 0);
    std::vector<double> x = starts[si];
    std::size_t count = 0;
    long last_new = 0;
    idxs.clear();
    net.hit(x.data(), idxs);
    for (std::size_t b : idxs)
      if (!covered[b]) {
        covered[b] = 1;
        ++count;
      }
    long steps = 0;
    for (long t = 1; t <= horizon && count < N; ++t) {
      step_num(x.data());
      steps = t;
      idxs.clear();
      net.hit(x.data(), idxs);
      for (std::size_t b : idxs)
        if (!covered[b]) {
          covered[b] = 1;
          ++count;
          last_new = t;
        }
      if (t - last_new > stall) break;
    }
    double frac = N == 0 ? 1.0 : static_cast<double>(count) / static_cast<double>(N);
    out.fractions.push_back(frac);
    if (frac < 1.0) {
      out.all_covered = false;
      if (out.witness_sample == static_cast<std::size_t>(-1)) {
        out.witness_sample = si;
        out.witness_covered = covered;
        out.witness_start = starts[si];
        out.witness_steps = steps;
      }
    }
    if (frac < out.fractions[out.worst]) out.worst = si;
  }
  return out;
}

// Turns a coverage shortfall into fail or inconclusive. fail needs an exact
// reason: a defect function validated along the witness orbit and large on an
// uncovered ball, or a fully enumerated finite orbit. Anything weaker keeps
// the three-valued discipline honest and reports inconclusive.
void resolve_shortfall(DensityReport& r, const SystemDescriptor& s, const NetIndexer& net,
                       const ScanCoreOut& sc, bool full_orbit, const Int& period,
                       double defect_tol, long horizon) {
  std::vector<std::size_t> uncovered;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (!sc.witness_covered[i]) uncovered.push_back(i);
  const std::size_t lowest = uncovered.front();
  json lowest_ball = ball_json(net, lowest);

  const ObstructionWitness* ow = s.obstruction ? &*s.obstruction : nullptr;
  if (ow && ow->defect && s.step_num) {
    const long vsteps = std::min(horizon, kDefectValidationSteps);
    std::vector<double> x = sc.witness_start;
    double orbit_worst = ow->defect(sc.witness_start.data(), x.data());
    for (long t = 1; t <= vsteps; ++t) {
      s.step_num(x.data());
      orbit_worst = std::max(orbit_worst, ow->defect(sc.witness_start.data(), x.data()));
    }
    r.evidence["orbit_defect_max"] = orbit_worst;
    if (orbit_worst > defect_tol) {
      r.verdict = Verdict::inconclusive;
      r.witness = {{"ball", lowest_ball},
                   {"note", "obstruction defect failed validation along the sampled orbit"}};
      return;
    }
    std::size_t best = lowest;
    double dmax = -1.0;
    for (std::size_t i : uncovered) {
      double d = ow->defect(sc.witness_start.data(), net.center(i));
      if (d > dmax) {
        dmax = d;
        best = i;
      }
    }
    if (dmax > defect_tol) {
      r.verdict = Verdict::fail;
      r.witness = {{"ball", ball_json(net, best)},
                   {"obstruction", to_string(ow->kind)},
                   {"detail", ow->detail},
                   {"defect", dmax},
                   {"defect_checked", true}};
      return;
    }
    r.verdict = Verdict::inconclusive;
    r.witness = {{"ball", lowest_ball},
                 {"note", "no uncovered ball carries a defect above tolerance"}};
    return;
  }

  if (full_orbit) {
    r.verdict = Verdict::fail;
    json detail = ow ? ow->detail : json{{"period", period.str()}};
    r.witness = {{"ball", lowest_ball},
                 {"obstruction", ow ? to_string(ow->kind)
                                    : to_string(ObstructionWitness::Kind::FiniteOrder)},
                 {"detail", detail},
                 {"defect_checked", false}};
    return;
  }

  r.verdict = Verdict::inconclusive;
  if (ow) {
    r.witness = {{"ball", lowest_ball},
                 {"note", "obstruction lacks an evaluable defect at this horizon"}};
  } else {
    r.witness = {{"ball", lowest_ball}};
  }
}

DensityReport run_density(const SystemDescriptor& s, const NetIndexer& net,
                          const std::vector<std::vector<double>>& starts, double eps, long horizon,
                          long stall, bool full_orbit, const Int& period, double defect_tol) {
  DensityReport r;
  r.epsilon = eps;
  r.horizon = horizon;
  r.samples = starts.size();

  ScanCoreOut sc = scan_core(s.step_num, net, starts, horizon, stall);
  r.worst_cover_fraction = sc.fractions.empty() ? 0.0 : sc.fractions[sc.worst];
  r.evidence["net_points"] = net.size();
  r.evidence["fractions"] = sc.fractions;
  r.evidence["stall"] = stall;
  if (full_orbit) r.evidence["orbit_period"] = period.str();

  if (sc.all_covered) {
    r.verdict = Verdict::pass;
    return r;
  }
  r.evidence["witness_sample"] = sc.witness_sample;
  r.evidence["witness_steps"] = sc.witness_steps;
  resolve_shortfall(r, s, net, sc, full_orbit, period, defect_tol, horizon);
  return r;
}

long auto_stall(std::size_t net_points, long requested) {
  if (requested > 0) return requested;
  return std::max<long>(static_cast<long>(50 * net_points), 20000);
}

}  // namespace

Report DensityReport::to_report() const {
  Report rep;
  rep.op = "minimality-scan";
  rep.params = {{"epsilon", epsilon}, {"horizon", horizon}, {"samples", samples}};
  rep.verdict = verdict;
  rep.evidence = evidence;
  rep.evidence["worst_cover_fraction"] = worst_cover_fraction;
  rep.witness = witness;
  return rep;
}

DensityReport minimality_scan(const SystemDescriptor& s, const ScanOptions& opts) {
  if (opts.eps <= 0) throw ConfigError("minimality_scan needs eps > 0");
  if (!s.step_num) throw ConfigError("minimality_scan needs a numeric step");
  const std::size_t samples = std::max<std::size_t>(opts.samples, 1);

  NetIndexer net = s.space.make_net(opts.eps);
  long horizon = opts.horizon;
  long stall = auto_stall(net.size(), opts.stall);

  bool full_orbit = false;
  Int period = 0;
  if (s.exact_period && *s.exact_period <= Int(opts.period_cap)) {
    period = *s.exact_period;
    long pl = period.convert_to<long>();
    if (pl <= opts.horizon) {
      // the orbit closes after pl steps; walking further cannot add coverage
      horizon = pl;
      stall = pl + 1;
      full_orbit = true;
    }
  }

  std::vector<SpacePoint> pts = s.space.sampler(samples, opts.seed);
  std::vector<std::vector<double>> starts;
  starts.reserve(pts.size());
  for (const SpacePoint& p : pts) starts.push_back(s.space.embed(p));

  DensityReport r =
      run_density(s, net, starts, opts.eps, horizon, stall, full_orbit, period, opts.defect_tol);
  r.horizon = opts.horizon;
  r.evidence["seed"] = opts.seed;
  r.evidence["steps_effective"] = horizon;
  return r;
}

json ProductCertificate::to_json() const {
  json j;
  j["verdict"] = to_string(verdict);
  json w = json::array();
  for (const Int& v : witness) w.push_back(v.str());
  j["witness"] = w;
  return j;
}

ProductCertificate torus_product_certificate(const std::vector<SymReal>& x,
                                             const std::vector<SymReal>& g) {
  if (x.empty() || g.empty())
    throw ConfigError("torus_product_certificate needs nonempty rotation vectors");
  auto check_factor = [](const std::vector<SymReal>& v, int which) {
    Independence ind = rational_independence(v);
    if (!ind.independent) {
      std::vector<std::string> w;
      w.reserve(ind.witness.size());
      for (const Int& i : ind.witness) w.push_back(i.str());
      throw FactorNotMinimal("rotation factor " + std::to_string(which) +
                                 " carries an exact integer relation on (1, coordinates)",
                             which, std::move(w));
    }
  };
  check_factor(x, 0);
  check_factor(g, 1);

  std::vector<SymReal> all = x;
  all.insert(all.end(), g.begin(), g.end());
  Independence ind = rational_independence(all);
  ProductCertificate c;
  if (ind.independent) {
    c.verdict = Verdict::minimal;
  } else {
    c.verdict = Verdict::nonminimal;
    c.witness = ind.witness;
  }
  return c;
}

Report weyl_test(const SymReal& alpha, const std::function<long(long)>& idx, long max_char,
                 long n, double tol) {
  if (max_char < 1 || n < 1) throw ConfigError("weyl_test needs max_char >= 1 and n >= 1");
  const double a = alpha.approx();
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(max_char));
  long worst_char = 1;
  double worst_ratio = -1.0;
  for (long k = 1; k <= max_char; ++k) {
    double sr = 0.0, si = 0.0;
    for (long m = 1; m <= n; ++m) {
      const long km = idx ? idx(m) : m;
      const double t = 2.0 * static_cast<double>(k) * static_cast<double>(km) * a;
      sr += cospi(t);
      si += sinpi(t);
    }
    const double ratio = std::hypot(sr, si) / static_cast<double>(n);
    ratios.push_back(ratio);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_char = k;
    }
  }
  Report rep;
  rep.op = "weyl-test";
  rep.params = {{"alpha", alpha.describe()},
                {"max_char", max_char},
                {"n", n},
                {"tol", tol},
                {"indices", idx ? "custom" : "linear"}};
  rep.evidence = {{"ratios", ratios}, {"max_ratio", worst_ratio}};
  if (worst_ratio <= tol) {
    rep.verdict = Verdict::pass;
  } else {
    rep.verdict = Verdict::fail;
    rep.witness = {{"character", worst_char}, {"ratio", worst_ratio}};
  }
  return rep;
}

json HittingSet::to_json() const {
  json j;
  j["from"] = {{"center", from.center}, {"radius", from.radius}};
  j["to"] = {{"center", to.center}, {"radius", to.radius}};
  j["count"] = times.size();
  json ts = json::array();
  for (std::size_t i = 0; i < times.size() && i < 64; ++i) ts.push_back(times[i]);
  j["times"] = ts;
  j["truncated"] = times.size() > 64;
  j["max_gap"] = max_gap;
  j["tail_gap"] = tail_gap;
  return j;
}

Report TransitivityReport::to_report() const {
  Report rep;
  rep.op = "transitivity-scan";
  rep.params = {{"eps", eps}, {"horizon", horizon}};
  rep.verdict = verdict;
  std::size_t unhit = 0;
  long overall_gap = 0;
  for (const HittingSet& h : pairs) {
    if (h.times.empty()) ++unhit;
    overall_gap = std::max(overall_gap, h.max_gap);
  }
  rep.evidence = {{"pairs", pairs.size()}, {"unhit", unhit}, {"max_gap_overall", overall_gap}};
  if (unhit > 0) {
    for (const HittingSet& h : pairs)
      if (h.times.empty()) {
        rep.witness = h.to_json();
        break;
      }
  }
  return rep;
}

TransitivityReport transitivity_scan(const SystemDescriptor& s, double eps, long horizon) {
  if (eps <= 0) throw ConfigError("transitivity_scan needs eps > 0");
  if (!s.step_num) throw ConfigError("transitivity_scan needs a numeric step");
  TransitivityReport tr;
  tr.eps = eps;
  tr.horizon = horizon;

  NetIndexer net = s.space.make_net(eps);
  const std::size_t N = net.size();
  if (N * N > 65536)
    throw ConfigError("transitivity scan at this eps would track too many ball pairs");

  std::vector<std::vector<std::vector<long>>> times(N, std::vector<std::vector<long>>(N));
  std::vector<std::size_t> idxs;
  for (std::size_t u = 0; u < N; ++u) {
    std::vector<double> x(net.center(u), net.center(u) + net.dim);
    for (long t = 1; t <= horizon; ++t) {
      s.step_num(x.data());
      idxs.clear();
      net.hit(x.data(), idxs);
      for (std::size_t v : idxs) times[u][v].push_back(t);
    }
  }

  bool all_hit = true;
  tr.pairs.reserve(N * N);
  for (std::size_t u = 0; u < N; ++u) {
    for (std::size_t v = 0; v < N; ++v) {
      HittingSet hs;
      hs.from.center.assign(net.center(u), net.center(u) + net.dim);
      hs.from.radius = eps;
      hs.to.center.assign(net.center(v), net.center(v) + net.dim);
      hs.to.radius = eps;
      hs.times = std::move(times[u][v]);
      if (hs.times.empty()) {
        all_hit = false;
        hs.max_gap = horizon;
        hs.tail_gap = horizon;
      } else {
        long prev = 0, mg = 0;
        for (long tt : hs.times) {
          mg = std::max(mg, tt - prev);
          prev = tt;
        }
        hs.max_gap = mg;
        hs.tail_gap = horizon - hs.times.back();
      }
      tr.pairs.push_back(std::move(hs));
    }
  }
  tr.verdict = all_hit ? Verdict::pass : Verdict::fail;
  return tr;
}

Report syndetic_gaps(const std::function<SystemDescriptor(double)>& flow, const Ball& from,
                     const Ball& to, double t_max, double dt) {
  if (dt <= 0) throw ConfigError("syndetic_gaps needs dt > 0");
  if (t_max < 0) throw ConfigError("syndetic_gaps needs t_max >= 0");

  std::vector<double> hits;
  const long steps = static_cast<long>(std::floor(t_max / dt + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    SystemDescriptor st = flow(t);
    if (!st.step_num) throw ConfigError("syndetic_gaps needs numeric time-t steps");
    if (from.center.size() != st.space.dim || to.center.size() != st.space.dim)
      throw ConfigError("syndetic_gaps ball dimension does not match the flow's space");
    std::vector<double> x = from.center;
    st.step_num(x.data());
    if (st.space.metric_num(x.data(), to.center.data()) <= to.radius) hits.push_back(t);
  }

  double max_gap = t_max;
  double tail_gap = t_max;
  if (!hits.empty()) {
    max_gap = hits.front();
    for (std::size_t i = 1; i < hits.size(); ++i) max_gap = std::max(max_gap, hits[i] - hits[i - 1]);
    tail_gap = t_max - hits.back();
  }

  Report rep;
  rep.op = "syndetic-gaps";
  rep.params = {{"t_max", t_max},
                {"dt", dt},
                {"from", {{"center", from.center}, {"radius", from.radius}}},
                {"to", {{"center", to.center}, {"radius", to.radius}}}};
  rep.evidence = {{"hits", hits.size()}, {"max_gap", max_gap}, {"tail_gap", tail_gap}};
  if (!hits.empty()) {
    rep.evidence["first_hit"] = hits.front();
    rep.evidence["last_hit"] = hits.back();
    rep.verdict = Verdict::pass;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.witness = {{"note", "no hitting times found on the sampled grid"}};
  }
  return rep;
}

SymReal InvariantWitness::value(const SpacePoint& p) const {
  const TorusPt& t = p.as<TorusPt>();
  if (t.c.size() != 2) throw ConfigError("invariant function is defined on the 2-torus");
  return sym_frac(t.c[0].scaled(Rational(b)) - t.c[1].scaled(Rational(a)));
}

SystemDescriptor InvariantWitness::affine_map() const {
  return torus_rotation(
      {sym_frac(t0.scaled(Rational(a))), sym_frac(t0.scaled(Rational(b)))});
}

Report InvariantWitness::certify(long orbit_steps, std::size_t points, std::uint64_t seed) const {
  SystemDescriptor F = affine_map();
  Rng rng(seed);
  auto rand_coord = [&rng]() {
    return SymReal(Rational(Int(static_cast<long long>(rng.bits() >> 11)), Int(1) << 53));
  };

  long violations = 0;
  json first_violation;

  SpacePoint p = torus_point({rand_coord(), rand_coord()});
  const SymReal v0 = value(p);
  for (long t = 1; t <= orbit_steps; ++t) {
    p = F.step(p);
    if (!identical(value(p), v0)) {
      ++violations;
      if (first_violation.is_null())
        first_violation = {{"mode", "orbit"}, {"time", t}, {"point", point_to_json(p)}};
    }
  }
  for (std::size_t i = 0; i < points; ++i) {
    SpacePoint q = torus_point({rand_coord(), rand_coord()});
    const SymReal before = value(q);
    SpacePoint q1 = F.step(q);
    if (!identical(value(q1), before)) {
      ++violations;
      if (first_violation.is_null())
        first_violation = {{"mode", "point"}, {"index", i}, {"point", point_to_json(q)}};
    }
  }

  Report rep;
  rep.op = "invariant-function";
  rep.params = {{"a", a},
                {"b", b},
                {"t0", t0.describe()},
                {"orbit_steps", orbit_steps},
                {"points", points},
                {"seed", seed}};
  rep.evidence = {{"violations", violations}, {"exact", violations == 0}};
  rep.verdict = violations == 0 ? Verdict::pass : Verdict::fail;
  rep.witness = first_violation;
  return rep;
}

InvariantWitness invariant_function_witness(long a, long b, SymReal t0) {
  if (a == 0 && b == 0)
    throw ConfigError("invariant_function_witness needs (a, b) != (0, 0)");
  InvariantWitness w;
  w.a = a;
  w.b = b;
  w.t0 = std::move(t0);
  return w;
}

json RecurrenceLevel::to_json() const {
  json j;
  j["radius"] = radius;
  j["period"] = period.str();
  j["verified"] = verified;
  j["attempted"] = attempted;
  j["max_drift"] = max_drift;
  j["exact"] = exact;
  return j;
}

std::vector<RecurrenceLevel> periodic_recurrence_check(const SystemDescriptor& s,
                                                       const SpacePoint& x, long depth,
                                                       long verify_count, long period_bound) {
  if (depth < 1) throw ConfigError("periodic_recurrence_check needs depth >= 1");
  if (verify_count < 1) throw ConfigError("periodic_recurrence_check needs verify_count >= 1");
  std::vector<RecurrenceLevel> out;

  if (s.space.kind == SpaceKind::Cantor && s.step) {
    // digit path: agreement on the first m digits is exactly distance <= 2^-m,
    // and the return time into that cylinder is base^m on the truncated word
    const CantorPt& cp = x.as<CantorPt>();
    const long max_m = std::min<long>(depth, static_cast<long>(cp.w.size()));
    constexpr long kStepBudget = 2000000;
    for (long m = 1; m <= max_m; ++m) {
      RecurrenceLevel lev;
      lev.radius = std::ldexp(1.0, -static_cast<int>(m));
      Int p = 1;
      for (long i = 0; i < m; ++i) p *= cp.base;
      lev.period = p;
      if (p * verify_count > kStepBudget) {
        out.push_back(lev);
        break;
      }
      const long pl = p.convert_to<long>();
      SpacePoint y = x;
      long done = 0;
      double drift = 0.0;
      bool all_exact = true;
      for (long k = 1; k <= verify_count; ++k) {
        for (long i = 0; i < pl; ++i) y = s.step(y);
        const CantorPt& cy = y.as<CantorPt>();
        drift = std::max(drift, s.space.metric(y, x));
        if (std::equal(cp.w.begin(), cp.w.begin() + m, cy.w.begin()))
          ++done;
        else
          all_exact = false;
      }
      lev.attempted = verify_count;
      lev.verified = done;
      lev.max_drift = drift;
      lev.exact = all_exact;
      out.push_back(lev);
    }
    return out;
  }

  if (!s.step_num) throw ConfigError("periodic_recurrence_check needs a numeric step");
  const std::vector<double> x0 = s.space.embed(x);
  constexpr double kVerifyBudget = 4e6;
  for (long m = 1; m <= depth; ++m) {
    RecurrenceLevel lev;
    lev.radius = std::ldexp(0.5, -static_cast<int>(m));
    std::vector<double> y = x0;
    long p = 0;
    for (long t = 1; t <= period_bound; ++t) {
      s.step_num(y.data());
      if (s.space.metric_num(y.data(), x0.data()) <= lev.radius) {
        p = t;
        break;
      }
    }
    if (p == 0) {
      out.push_back(lev);
      continue;
    }
    lev.period = p;
    lev.attempted = 1;
    lev.max_drift = s.space.metric_num(y.data(), x0.data());
    lev.verified = lev.max_drift <= lev.radius ? 1 : 0;
    for (long k = 2; k <= verify_count; ++k) {
      if (static_cast<double>(p) * static_cast<double>(k) > kVerifyBudget) break;
      for (long i = 0; i < p; ++i) s.step_num(y.data());
      const double d = s.space.metric_num(y.data(), x0.data());
      ++lev.attempted;
      lev.max_drift = std::max(lev.max_drift, d);
      if (d <= lev.radius) ++lev.verified;
    }
    out.push_back(lev);
  }
  return out;
}

Report fiber_transitivity_check(const SystemDescriptor& skew, const SpacePoint& base_point,
                                double eps, long horizon) {
  if (!skew.skew_info || !skew.skew_base)
    throw ConfigError("fiber_transitivity_check needs a system built by skew_product");
  if (!skew.step_num) throw ConfigError("fiber_transitivity_check needs a numeric step");
  if (eps <= 0) throw ConfigError("fiber_transitivity_check needs eps > 0");

  const auto& si = *skew.skew_info;
  std::vector<double> base = skew.skew_base->space.embed(base_point);
  if (base.size() != si.base_dim)
    throw ConfigError("base point does not match the skew base space");

  SpaceDescriptor fiber = torus_space(nullptr, si.fiber_dim);
  NetIndexer fnet = fiber.make_net(eps);
  std::vector<std::vector<double>> starts;
  starts.reserve(fnet.size());
  for (std::size_t i = 0; i < fnet.size(); ++i) {
    std::vector<double> x = base;
    x.insert(x.end(), fnet.center(i), fnet.center(i) + fnet.dim);
    starts.push_back(std::move(x));
  }

  NetIndexer net = skew.space.make_net(eps);
  const long stall = auto_stall(net.size(), 0);
  DensityReport dr =
      run_density(skew, net, starts, eps, horizon, stall, false, Int(0), kDefectTol);

  Report rep = dr.to_report();
  rep.op = "fiber-transitivity";
  rep.params = {{"eps", eps},
                {"horizon", horizon},
                {"base_point", point_to_json(base_point)},
                {"fiber_points", fnet.size()}};
  return rep;
}

}  // namespace minprod
