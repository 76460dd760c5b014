#include <minprod/gallery.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <minprod/combinators.hpp>
#include <minprod/errors.hpp>
#include <minprod/numutil.hpp>

namespace minprod {
namespace {

Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    Int den(j[1].get<long long>());
    if (den == 0) throw ConfigError("zero denominator in " + j.dump());
    return Rational(Int(j[0].get<long long>()), den);
  }
  throw ConfigError("expected an integer or a [num, den] pair, got " + j.dump());
}

std::uint64_t entry_seed(std::uint64_t seed, std::size_t k) {
  return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1));
}

Ball ball_from(const json& j) {
  Ball b;
  b.center = j.at("center").get<std::vector<double>>();
  b.radius = j.at("radius").get<double>();
  return b;
}

ScanOptions scan_options_from(const json& p, std::uint64_t seed) {
  ScanOptions o;
  o.seed = seed;
  o.eps = p.at("eps").get<double>();
  if (p.contains("horizon")) o.horizon = p.at("horizon").get<long>();
  if (p.contains("samples")) o.samples = p.at("samples").get<std::size_t>();
  if (p.contains("seed")) o.seed = p.at("seed").get<std::uint64_t>();
  if (p.contains("period_cap")) o.period_cap = p.at("period_cap").get<long>();
  if (p.contains("defect_tol")) o.defect_tol = p.at("defect_tol").get<double>();
  if (p.contains("stall")) o.stall = p.at("stall").get<long>();
  return o;
}

SystemDescriptor resolve_system(const json& p, const Experiment& e, const BasisRegistry& reg) {
  if (p.contains("system")) return build_system(p.at("system"), reg);
  if (e.builder.is_null())
    throw ConfigError("plan entry needs a system: the experiment has no builder and the entry "
                      "no system override");
  return build_system(e.builder, reg);
}

Report run_recurrence(const SystemDescriptor& sys, const json& p, std::uint64_t seed) {
  long depth = p.at("depth").get<long>();
  long vc = p.value("verify_count", 8L);
  long pb = p.value("period_bound", 1000000L);
  bool expect_exact = p.value("expect_exact", false);
  SpacePoint x = sys.space.sampler(1, seed)[0];
  auto levels = periodic_recurrence_check(sys, x, depth, vc, pb);

  Report r;
  r.op = "recurrence";
  r.params = {{"depth", depth}, {"verify_count", vc}, {"expect_exact", expect_exact}};
  json larr = json::array();
  json bad;
  bool all_good = !levels.empty();
  bool contradiction = false;
  for (const auto& L : levels) {
    larr.push_back(L.to_json());
    bool good = L.period != 0 && L.attempted > 0 && L.verified == L.attempted &&
                (!expect_exact || L.exact);
    if (!good && bad.is_null()) bad = L.to_json();
    // an exact-arithmetic return that misses its own period is disproof;
    // anything weaker is only a budget shortfall
    if (L.exact && L.attempted > 0 && L.verified < L.attempted) contradiction = true;
    all_good = all_good && good;
  }
  r.evidence = {{"levels", larr}};
  if (all_good) {
    r.verdict = Verdict::pass;
  } else {
    r.verdict = contradiction ? Verdict::fail : Verdict::inconclusive;
    r.witness = {{"level", bad}};
  }
  return r;
}

Report run_torus_cert(const json& p, const BasisRegistry& reg) {
  std::vector<SymReal> x, g;
  for (const auto& c : p.at("x")) x.push_back(build_symreal(c, reg));
  for (const auto& c : p.at("g")) g.push_back(build_symreal(c, reg));
  Report r;
  r.op = "torus-certificate";
  json xs = json::array(), gs = json::array();
  for (const auto& s : x) xs.push_back(s.describe());
  for (const auto& s : g) gs.push_back(s.describe());
  r.params = {{"x", xs}, {"g", gs}};
  try {
    ProductCertificate c = torus_product_certificate(x, g);
    r.verdict = c.verdict;
    r.evidence = c.to_json();
    if (c.verdict == Verdict::nonminimal) r.witness = c.to_json();
  } catch (const FactorNotMinimal& f) {
    // a factor that fails its own certificate already settles the product
    r.verdict = Verdict::nonminimal;
    json w = json::array();
    for (const auto& s : f.witness) w.push_back(s);
    r.evidence = {{"factor_index", f.factor_index}, {"factor_witness", w}};
    r.witness = r.evidence;
  }
  return r;
}

Report run_syndetic(const json& p, const BasisRegistry& reg) {
  std::vector<double> dir;
  for (const auto& c : p.at("direction"))
    dir.push_back(c.is_number() ? c.get<double>() : build_symreal(c, reg).approx());
  if (dir.empty()) throw ConfigError("syndetic-gaps needs a nonempty direction");
  Ball from = ball_from(p.at("from"));
  Ball to = ball_from(p.at("to"));
  auto flow = [dir](double t) {
    std::vector<double> shift;
    shift.reserve(dir.size());
    for (double d : dir) shift.push_back(d * t);
    return torus_translation_numeric(shift.size(), std::move(shift));
  };
  return syndetic_gaps(flow, from, to, p.at("t_max").get<double>(), p.at("dt").get<double>());
}

Report run_denjoy_factor(const json& p, std::uint64_t seed, const BasisRegistry& reg) {
  SymReal alpha = build_symreal(p.at("alpha"), reg);
  DenjoySystem d = denjoy_system(alpha, rational_from(p.at("gap")), p.at("window").get<long>());
  FactorVerifyOptions fo;
  fo.seed = seed;
  return verify_factor(d.factor, p.value("samples", std::size_t{16}), p.value("horizon", 128L), fo);
}

Report run_scurve(const json& p, const BasisRegistry& reg) {
  std::vector<SymReal> alphas;
  for (const auto& c : p.at("alphas")) alphas.push_back(build_symreal(c, reg));
  DiscFamily fam = scurve_family(alphas, rational_from(p.at("r0")), p.at("window").get<long>());
  return fam.density_evidence(p.value("grid", std::size_t{256}));
}

// Empirical pass frequency of the density scan over products with `count`
// rotations sampled uniformly; the sampled angles are exact dyadics so every
// run is replayable. pass iff frequency >= threshold.
Report run_generic_rotation(const json& p, std::uint64_t seed, const BasisRegistry& reg) {
  SymReal base = build_symreal(p.at("base"), reg);
  long count = p.value("count", 50L);
  double eps = p.value("eps", 0.2);
  long horizon = p.value("horizon", 20000L);
  std::size_t samples = p.value("samples", std::size_t{2});
  double threshold = p.value("threshold", 0.9);
  SystemDescriptor rot = circle_rotation(base);
  Rng rng(seed);
  long passes = 0;
  json misses = json::array();
  for (long i = 0; i < count; ++i) {
    std::uint64_t k = rng.bits() >> 11;
    Rational g(Int(k), Int(std::uint64_t{1} << 53));
    ScanOptions so;
    so.eps = eps;
    so.horizon = horizon;
    so.samples = samples;
    so.seed = entry_seed(seed, static_cast<std::size_t>(i) + 1);
    DensityReport dr = minimality_scan(direct_product(rot, circle_rotation(SymReal(g))), so);
    if (dr.verdict == Verdict::pass) {
      ++passes;
    } else if (misses.size() < 8) {
      misses.push_back({{"g", g.convert_to<double>()}, {"verdict", to_string(dr.verdict)}});
    }
  }
  double freq = count > 0 ? static_cast<double>(passes) / static_cast<double>(count) : 0.0;
  Report r;
  r.op = "generic-rotation-frequency";
  r.params = {{"base", base.describe()}, {"count", count},      {"eps", eps},
              {"horizon", horizon},      {"samples", samples},  {"threshold", threshold}};
  r.evidence = {{"passes", passes}, {"frequency", freq}};
  if (!misses.empty()) r.evidence["misses"] = misses;
  r.verdict = freq >= threshold ? Verdict::pass : Verdict::inconclusive;
  if (r.verdict != Verdict::pass) r.witness = {{"frequency", freq}, {"threshold", threshold}};
  return r;
}

// Same frequency harness over time-t maps of a linear torus flow, t sampled
// uniformly from [1/2, 3/2].
Report run_flow_frequency(const json& p, std::uint64_t seed, const BasisRegistry& reg) {
  std::vector<double> dir;
  for (const auto& c : p.at("direction"))
    dir.push_back(c.is_number() ? c.get<double>() : build_symreal(c, reg).approx());
  if (dir.empty()) throw ConfigError("flow-frequency needs a nonempty direction");
  long count = p.value("count", 10L);
  double eps = p.value("eps", 0.2);
  long horizon = p.value("horizon", 20000L);
  std::size_t samples = p.value("samples", std::size_t{2});
  double threshold = p.value("threshold", 0.8);
  Rng rng(seed);
  long passes = 0;
  json misses = json::array();
  for (long i = 0; i < count; ++i) {
    double t = 0.5 + rng.unit();
    std::vector<double> shift;
    shift.reserve(dir.size());
    for (double d : dir) shift.push_back(d * t);
    ScanOptions so;
    so.eps = eps;
    so.horizon = horizon;
    so.samples = samples;
    so.seed = entry_seed(seed, static_cast<std::size_t>(i) + 1);
    DensityReport dr = minimality_scan(torus_translation_numeric(dir.size(), shift), so);
    if (dr.verdict == Verdict::pass) {
      ++passes;
    } else if (misses.size() < 8) {
      misses.push_back({{"t", t}, {"verdict", to_string(dr.verdict)}});
    }
  }
  double freq = count > 0 ? static_cast<double>(passes) / static_cast<double>(count) : 0.0;
  Report r;
  r.op = "flow-frequency";
  r.params = {{"direction", p.at("direction")}, {"count", count},     {"eps", eps},
              {"horizon", horizon},             {"samples", samples}, {"threshold", threshold}};
  r.evidence = {{"passes", passes}, {"frequency", freq}};
  if (!misses.empty()) r.evidence["misses"] = misses;
  r.verdict = freq >= threshold ? Verdict::pass : Verdict::inconclusive;
  if (r.verdict != Verdict::pass) r.witness = {{"frequency", freq}, {"threshold", threshold}};
  return r;
}

// Greedy construction of a transitive cocycle over a circle rotation, then a
// fibered density check of the resulting skew product.
Report run_cocycle_builder(const json& p, std::uint64_t seed, const BasisRegistry& reg) {
  SymReal base = build_symreal(p.at("base"), reg);
  long npairs = p.value("pairs", 8L);
  double prad = p.value("pair_radius", 0.1);
  long budget = p.value("budget", 64L);
  BuildOptions bo;
  if (p.contains("grid_bits")) bo.grid_bits = p.at("grid_bits").get<std::size_t>();
  if (p.contains("check_horizon")) bo.check_horizon = p.at("check_horizon").get<long>();
  if (p.contains("return_horizon")) bo.return_horizon = p.at("return_horizon").get<long>();
  bo.symmetrize = p.value("symmetrize", false);
  std::vector<double> schedule =
      p.value("schedule", std::vector<double>{0.1, 0.08, 0.06});

  Rng rng(seed);
  std::vector<TransitivePair> pairs;
  pairs.reserve(static_cast<std::size_t>(npairs));
  for (long i = 0; i < npairs; ++i) {
    Ball from{{rng.unit(), rng.unit()}, prad};
    Ball to{{rng.unit(), rng.unit()}, prad};
    pairs.push_back({from, to});
  }
  SystemDescriptor rot = circle_rotation(base);
  BuildResult built = build_transitive_cocycle(rot, pairs, schedule, budget, bo);

  Report r;
  r.op = "cocycle-builder";
  r.params = {{"base", base.describe()},
              {"pairs", npairs},
              {"pair_radius", prad},
              {"budget", budget}};
  r.evidence = {{"complete", built.complete},
                {"perturbations", built.perturbations},
                {"coverage", built.coverage}};
  if (!built.complete) {
    r.verdict = Verdict::inconclusive;
    r.witness = {{"note", "builder left pairs uncovered within the budget"}};
    return r;
  }
  SystemDescriptor skew = skew_product(rot, built.f, 1);
  SpacePoint bp = skew.skew_base->space.sampler(1, seed)[0];
  Report fr = fiber_transitivity_check(skew, bp, p.value("fiber_eps", 0.3),
                                       p.value("fiber_horizon", 200000L));
  r.evidence["fiber"] = fr.to_json();
  r.verdict = fr.verdict;
  if (fr.verdict != Verdict::pass) {
    r.witness = fr.witness;
    return r;
  }
  // optional second stage: descend to the Klein bottle (requires the
  // symmetrized build) and rerun the density scan on the quotient
  if (p.contains("klein_scan")) {
    const json& ks = p.at("klein_scan");
    ScanOptions so;
    so.seed = seed;
    so.eps = ks.at("eps").get<double>();
    if (ks.contains("horizon")) so.horizon = ks.at("horizon").get<long>();
    if (ks.contains("samples")) so.samples = ks.at("samples").get<std::size_t>();
    if (ks.contains("stall")) so.stall = ks.at("stall").get<long>();
    DensityReport dr = minimality_scan(klein_quotient(skew), so);
    r.evidence["klein"] = dr.to_report().to_json();
    r.verdict = dr.verdict;
    if (dr.verdict != Verdict::pass) r.witness = dr.witness;
  }
  return r;
}

Report run_entry(const Experiment& e, const json& ent, std::uint64_t seed,
                 const BasisRegistry& reg) {
  std::string op = ent.at("op").get<std::string>();
  json p = ent.value("params", json::object());
  if (op == "minimality-scan")
    return minimality_scan(resolve_system(p, e, reg), scan_options_from(p, seed)).to_report();
  if (op == "transitivity-scan")
    return transitivity_scan(resolve_system(p, e, reg), p.at("eps").get<double>(),
                             p.at("horizon").get<long>())
        .to_report();
  if (op == "fiber-transitivity") {
    SystemDescriptor s = resolve_system(p, e, reg);
    if (!s.skew_base) throw ConfigError("fiber-transitivity needs a skew product system");
    SpacePoint bp = s.skew_base->space.sampler(1, seed)[0];
    return fiber_transitivity_check(s, bp, p.at("eps").get<double>(),
                                    p.at("horizon").get<long>());
  }
  if (op == "recurrence") return run_recurrence(resolve_system(p, e, reg), p, seed);
  if (op == "weyl-test")
    return weyl_test(build_symreal(p.at("alpha"), reg), nullptr, p.at("max_char").get<long>(),
                     p.at("n").get<long>(), p.value("tol", 1e-2));
  if (op == "torus-cert") return run_torus_cert(p, reg);
  if (op == "invariant-function")
    return invariant_function_witness(p.at("a").get<long>(), p.at("b").get<long>(),
                                      build_symreal(p.at("t0"), reg))
        .certify(p.value("orbit_steps", 1000L), p.value("points", std::size_t{1000}),
                 p.value("seed", seed));
  if (op == "syndetic-gaps") return run_syndetic(p, reg);
  if (op == "denjoy-factor") return run_denjoy_factor(p, seed, reg);
  if (op == "scurve-geometry") return run_scurve(p, reg);
  if (op == "generic-rotation-frequency") return run_generic_rotation(p, seed, reg);
  if (op == "flow-frequency") return run_flow_frequency(p, seed, reg);
  if (op == "cocycle-builder") return run_cocycle_builder(p, seed, reg);
  throw ConfigError("unknown analysis op: " + op);
}

const std::set<std::string>& known_ops() {
  static const std::set<std::string> ops = {
      "minimality-scan", "transitivity-scan",          "fiber-transitivity",
      "recurrence",      "weyl-test",                  "torus-cert",
      "invariant-function", "syndetic-gaps",           "denjoy-factor",
      "scurve-geometry", "generic-rotation-frequency", "flow-frequency",
      "cocycle-builder"};
  return ops;
}

// Structural validation ahead of the run: builder expressions must evaluate,
// ops must exist, expectations must name verdicts. Analysis failures later
// are recorded per entry instead.
void validate(const Experiment& e, const BasisRegistry& reg) {
  if (e.name.empty()) throw ConfigError("experiment needs a name");
  if (!e.plan.is_array() || e.plan.empty())
    throw ConfigError("experiment " + e.name + " has an empty analysis plan");
  if (!e.builder.is_null()) build_system(e.builder, reg);
  for (const auto& ent : e.plan) {
    if (!ent.is_object() || !ent.contains("op") || !ent.contains("expect"))
      throw ConfigError("plan entries need op and expect fields: " + ent.dump());
    std::string op = ent.at("op").get<std::string>();
    if (!known_ops().count(op)) throw ConfigError("unknown analysis op: " + op);
    verdict_from_string(ent.at("expect").get<std::string>());
    if (ent.contains("params") && ent.at("params").contains("system"))
      build_system(ent.at("params").at("system"), reg);
  }
}

}  // namespace

SymReal build_symreal(const json& expr, const BasisRegistry& reg) {
  if (expr.is_number_integer()) return SymReal(Rational(expr.get<long long>()));
  if (expr.is_string()) {
    std::string name = expr.get<std::string>();
    auto idx = reg.find(name);
    if (!idx) throw ConfigError("unknown generator name: " + name);
    return SymReal::generator(reg, *idx);
  }
  if (expr.is_array() && !expr.empty() && expr[0].is_string()) {
    std::string op = expr[0].get<std::string>();
    if (op == "plus" && expr.size() == 3)
      return build_symreal(expr[1], reg) + build_symreal(expr[2], reg);
    if (op == "scale" && expr.size() == 3)
      return build_symreal(expr[2], reg).scaled(rational_from(expr[1]));
    throw ConfigError("unknown constant operator in " + expr.dump());
  }
  if (expr.is_array() && expr.size() == 2) return SymReal(rational_from(expr));
  throw ConfigError("malformed constant expression: " + expr.dump());
}

Cocycle build_cocycle(const json& expr, const BasisRegistry& reg) {
  if (!expr.is_array() || expr.empty() || !expr[0].is_string())
    throw ConfigError("malformed cocycle expression: " + expr.dump());
  std::string op = expr[0].get<std::string>();
  if (op == "zero") return zero_cocycle(expr.size() > 1 ? expr.at(1).get<std::size_t>() : 1);
  if (op == "const") {
    std::vector<SymReal> c;
    for (const auto& a : expr.at(1)) c.push_back(build_symreal(a, reg));
    return const_cocycle(std::move(c));
  }
  if (op == "linear") return linear_cocycle(expr.at(1).get<long>());
  if (op == "sine") return sine_cocycle(expr.at(1).get<double>());
  if (op == "anzai") return anzai_cocycle();
  throw ConfigError("unknown cocycle operator: " + op);
}

SystemDescriptor build_system(const json& expr, const BasisRegistry& reg) {
  if (!expr.is_array() || expr.empty() || !expr[0].is_string())
    throw ConfigError("malformed system expression: " + expr.dump());
  std::string op = expr[0].get<std::string>();
  auto want = [&](std::size_t n) {
    if (expr.size() != n + 1)
      throw ConfigError(op + " takes " + std::to_string(n) + " arguments: " + expr.dump());
  };
  if (op == "circle-rotation") {
    want(1);
    return circle_rotation(build_symreal(expr[1], reg));
  }
  if (op == "torus-rotation") {
    want(1);
    std::vector<SymReal> a;
    for (const auto& c : expr[1]) a.push_back(build_symreal(c, reg));
    return torus_rotation(std::move(a));
  }
  if (op == "cyclic") {
    want(1);
    return cyclic_system(expr[1].get<long>());
  }
  if (op == "identity-circle") {
    want(0);
    return identity_system(circle_space(&reg));
  }
  if (op == "odometer") {
    want(2);
    return odometer(expr[1].get<std::uint32_t>(), expr[2].get<std::size_t>());
  }
  if (op == "suspension") {
    want(2);
    return suspension_time_t(build_system(expr[1], reg), build_symreal(expr[2], reg));
  }
  if (op == "denjoy") {
    want(3);
    return denjoy_system(build_symreal(expr[1], reg), rational_from(expr[2]),
                         expr[3].get<long>())
        .system;
  }
  if (op == "s3-translation") {
    want(4);
    return s3_translation(expr[1].get<double>(), expr[2].get<double>(), expr[3].get<double>(),
                          expr[4].get<double>());
  }
  if (op == "s3-axis") {
    want(1);
    double a = build_symreal(expr[1], reg).approx();
    return s3_translation(cospi(a), sinpi(a), 0.0, 0.0);
  }
  if (op == "two-circles-skew") {
    want(2);
    return two_circles_skew(build_symreal(expr[1], reg), build_symreal(expr[2], reg));
  }
  if (op == "two-circles-base") {
    want(1);
    return two_circles_base(build_symreal(expr[1], reg));
  }
  if (op == "torus-translation-numeric") {
    want(1);
    std::vector<double> shift = expr[1].get<std::vector<double>>();
    std::size_t n = shift.size();
    return torus_translation_numeric(n, std::move(shift));
  }
  if (op == "direct-product") {
    want(2);
    return direct_product(build_system(expr[1], reg), build_system(expr[2], reg));
  }
  if (op == "skew-product") {
    want(3);
    Cocycle f = build_cocycle(expr[2], reg);
    return skew_product(build_system(expr[1], reg), f, expr[3].get<std::size_t>());
  }
  if (op == "klein-quotient") {
    want(1);
    return klein_quotient(build_system(expr[1], reg));
  }
  throw ConfigError("unknown system operator: " + op);
}

const BasisRegistry& gallery_registry() {
  static const BasisRegistry reg({"sqrt2", "sqrt3", "sqrt5"});
  return reg;
}

json RunReport::to_json() const {
  json as = json::array();
  for (std::size_t i = 0; i < analyses.size(); ++i) {
    json a = analyses[i].to_json();
    a["expected"] = i < expected.size() ? expected[i] : "";
    a["matched"] = i < matched.size() && matched[i];
    as.push_back(std::move(a));
  }
  json j{{"experiment", experiment},
         {"anchor", anchor},
         {"params_hash", params_hash},
         {"analyses", std::move(as)},
         {"status", status ? "pass" : "fail"}};
  j["payload_hash"] = fnv1a64_hex(canonical_dump(j));
  j["wall_seconds"] = wall_seconds;
  return j;
}

std::string RunReport::hashed_payload() const {
  json j = to_json();
  j.erase("wall_seconds");
  j.erase("payload_hash");
  return fnv1a64_hex(canonical_dump(j));
}

Experiment experiment_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment must be an object: " + j.dump());
  Experiment e;
  try {
    e.name = j.at("name").get<std::string>();
    e.builder = j.value("builder", json());
    e.plan = j.at("plan");
    e.seed = j.value("seed", std::uint64_t{2026});
    e.anchor = j.value("anchor", std::string());
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed experiment: ") + ex.what());
  }
  return e;
}

RunReport run_experiment(const Experiment& e, const BasisRegistry& reg,
                         std::optional<std::uint64_t> seed_override) {
  Experiment eff = e;
  eff.seed = seed_override.value_or(e.seed);
  validate(eff, reg);

  RunReport rr;
  rr.experiment = eff.name;
  rr.anchor = eff.anchor;
  rr.params_hash = fnv1a64_hex(canonical_dump(json{{"name", eff.name},
                                                   {"builder", eff.builder},
                                                   {"plan", eff.plan},
                                                   {"seed", eff.seed}}));
  auto start = std::chrono::steady_clock::now();
  bool all = true;
  for (std::size_t k = 0; k < eff.plan.size(); ++k) {
    const json& ent = eff.plan[k];
    std::string expect = ent.at("expect").get<std::string>();
    Report rep;
    try {
      rep = run_entry(eff, ent, entry_seed(eff.seed, k), reg);
    } catch (const std::exception& ex) {
      rep.op = ent.at("op").get<std::string>();
      rep.params = ent.value("params", json::object());
      rep.verdict = Verdict::inconclusive;
      rep.evidence = json{{"error", ex.what()}};
    }
    bool m = to_string(rep.verdict) == expect;
    rr.analyses.push_back(std::move(rep));
    rr.expected.push_back(std::move(expect));
    rr.matched.push_back(m);
    all = all && m;
  }
  rr.status = all;
  rr.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rr;
}

RunReport run_experiment(const Experiment& e, std::optional<std::uint64_t> seed_override) {
  return run_experiment(e, gallery_registry(), seed_override);
}

std::vector<RunReport> run_experiments(const std::vector<Experiment>& es,
                                       const BasisRegistry& reg) {
  std::vector<std::future<RunReport>> futs;
  futs.reserve(es.size());
  for (const auto& e : es)
    futs.push_back(std::async(std::launch::async,
                              [&e, &reg] { return run_experiment(e, reg, std::nullopt); }));
  std::vector<RunReport> out;
  out.reserve(es.size());
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

json merge_reports(const std::vector<json>& runs) {
  json flat = json::array();
  std::function<void(const json&)> add = [&](const json& r) {
    if (r.is_array()) {
      for (const auto& x : r) add(x);
      return;
    }
    if (r.is_object() && r.contains("runs")) {
      add(r.at("runs"));
      return;
    }
    if (!r.is_object() || !r.contains("experiment"))
      throw ConfigError("not a run report: " + r.dump().substr(0, 160));
    flat.push_back(r);
  };
  for (const auto& r : runs) add(r);
  long passed = 0;
  for (const auto& r : flat)
    if (r.value("status", std::string()) == "pass") ++passed;
  long total = static_cast<long>(flat.size());
  return json{{"runs", std::move(flat)},
              {"total", total},
              {"passed", passed},
              {"status", passed == total ? "pass" : "fail"}};
}

const std::vector<Experiment>& gallery_catalog() {
  static const std::vector<Experiment> cat = [] {
    std::vector<Experiment> v;
    auto add = [&](const char* name, json builder, json plan, const char* anchor) {
      Experiment e;
      e.name = name;
      e.builder = std::move(builder);
      e.plan = std::move(plan);
      e.anchor = anchor;
      v.push_back(std::move(e));
    };
    auto step = [](const char* op, json params, const char* expect) {
      return json{{"op", op}, {"params", std::move(params)}, {"expect", expect}};
    };
    auto sys = [](const char* text) { return json::parse(text); };

    add("rational-rotation-period", sys(R"(["circle-rotation",[1,5]])"),
        json::array({step("minimality-scan", {{"eps", 0.05}}, "fail")}),
        "rotation by a reduced fraction p/q has a single orbit of q points and no dense orbit");

    add("irrational-rotation-density", sys(R"(["circle-rotation","sqrt2"])"),
        json::array({step("minimality-scan", {{"eps", 0.02}, {"horizon", 100000}}, "pass")}),
        "every orbit of an irrational rotation is dense");

    add("weyl-equidistribution", json(),
        json::array(
            {step("weyl-test", {{"alpha", "sqrt2"}, {"max_char", 5}, {"n", 100000}}, "pass"),
             step("weyl-test", {{"alpha", json::array({1, 2})}, {"max_char", 2}, {"n", 1000}},
                  "fail")}),
        "orbit averages of every nontrivial character vanish exactly when the angle is "
        "irrational");

    {
      json battery = json::array();
      auto cert = [&](const char* x, const char* g, const char* expect) {
        battery.push_back(step(
            "torus-cert", json{{"x", json::parse(x)}, {"g", json::parse(g)}}, expect));
      };
      cert(R"(["sqrt2"])", R"(["sqrt3"])", "minimal");
      cert(R"(["sqrt2"])", R"(["sqrt5"])", "minimal");
      cert(R"(["sqrt3"])", R"(["sqrt5"])", "minimal");
      cert(R"(["sqrt2","sqrt3"])", R"(["sqrt5"])", "minimal");
      cert(R"(["sqrt2"])", R"(["sqrt3","sqrt5"])", "minimal");
      cert(R"([["scale",[1,2],"sqrt2"]])", R"(["sqrt3"])", "minimal");
      cert(R"([["plus","sqrt2",[1,7]]])", R"(["sqrt3"])", "minimal");
      cert(R"([["plus","sqrt2","sqrt3"]])", R"(["sqrt3"])", "minimal");
      cert(R"(["sqrt2",["scale",[1,3],"sqrt3"]])", R"(["sqrt5"])", "minimal");
      cert(R"([["scale",[2,1],"sqrt5"]])", R"([["plus","sqrt2",[3,4]]])", "minimal");
      cert(R"(["sqrt2"])", R"(["sqrt2"])", "nonminimal");
      cert(R"(["sqrt2"])", R"([["plus","sqrt2",[1,2]]])", "nonminimal");
      cert(R"(["sqrt3"])", R"([["plus",["scale",[1,3],"sqrt3"],[5,6]]])", "nonminimal");
      cert(R"([["scale",[2,1],"sqrt2"]])", R"(["sqrt2"])", "nonminimal");
      cert(R"(["sqrt2","sqrt3"])", R"([["plus","sqrt2","sqrt3"]])", "nonminimal");
      cert(R"(["sqrt5"])", R"([["plus",["scale",[3,2],"sqrt5"],[1,4]]])", "nonminimal");
      cert(R"(["sqrt2"])", R"(["sqrt2","sqrt3"])", "nonminimal");
      cert(R"([["plus","sqrt3",[2,5]]])", R"(["sqrt3"])", "nonminimal");
      cert(R"(["sqrt2",["plus","sqrt5",[1,6]]])", R"(["sqrt5"])", "nonminimal");
      cert(R"([["scale",[4,3],"sqrt3"]])", R"([["scale",[2,1],"sqrt3"]])", "nonminimal");
      add("torus-cert-battery", json(), battery,
          "a product of torus rotations is minimal exactly when (1, all frequencies) is "
          "rationally independent");
    }

    add("product-with-generic-rotation", json(),
        json::array({step("generic-rotation-frequency",
                          {{"base", "sqrt2"},
                           {"count", 50},
                           {"eps", 0.2},
                           {"horizon", 20000},
                           {"samples", 2},
                           {"threshold", 0.9}},
                          "pass")}),
        "the product of a minimal rotation with a typical sampled rotation stays minimal");

    add("periodic-recurrence-product",
        sys(R"(["direct-product",["odometer",2,10],["circle-rotation","sqrt2"]])"),
        json::array(
            {step("recurrence",
                  {{"system", sys(R"(["odometer",2,10])")}, {"depth", 10}, {"expect_exact", true}},
                  "pass"),
             step("minimality-scan", {{"eps", 0.05}, {"horizon", 1000000}, {"samples", 4}},
                  "pass")}),
        "an odometer-rotation product is minimal and carries periodically recurrent points "
        "at every dyadic depth");

    add("fiber-transitivity",
        sys(R"(["skew-product",["circle-rotation","sqrt2"],["anzai"],1])"),
        json::array({step("fiber-transitivity", {{"eps", 0.05}, {"horizon", 1000000}}, "pass")}),
        "over a fixed base point the whole fiber consists of transitive points");

    add("cocycle-builder-transitive", json(),
        json::array({step("cocycle-builder",
                          {{"base", "sqrt2"},
                           {"pairs", 8},
                           {"pair_radius", 0.1},
                           {"budget", 64},
                           {"check_horizon", 20000},
                           {"fiber_eps", 0.3},
                           {"fiber_horizon", 200000}},
                          "pass")}),
        "a greedy perturbation search produces a cocycle whose skew product is transitive");

    add("klein-minimal",
        sys(R"(["klein-quotient",["skew-product",["circle-rotation","sqrt2"],["sine",0.3],1]])"),
        json::array(
            {step("minimality-scan", {{"eps", 0.05}, {"horizon", 1000000}, {"samples", 4}},
                  "inconclusive"),
             step("cocycle-builder",
                  {{"base", "sqrt2"},
                   {"pairs", 24},
                   {"pair_radius", 0.05},
                   {"budget", 64},
                   {"check_horizon", 500},
                   {"symmetrize", true},
                   {"fiber_eps", 0.3},
                   {"fiber_horizon", 200000},
                   {"klein_scan",
                    json{{"eps", 0.05}, {"horizon", 1000000}, {"samples", 4}, {"stall", 200000}}}},
                  "pass")}),
        "half-turn equivariant cocycles descend to the Klein bottle; the sine family descends "
        "exactly but stays cohomologous to a constant (its quotient orbits hug two curves), "
        "while a symmetrized built cocycle yields a dense quotient scan");

    add("denjoy-almost-1-1", sys(R"(["denjoy","sqrt2",[1,4],60])"),
        json::array(
            {step("denjoy-factor",
                  {{"alpha", "sqrt2"}, {"gap", json::array({1, 4})}, {"window", 60},
                   {"samples", 8}, {"horizon", 25}},
                  "pass"),
             step("minimality-scan", {{"eps", 0.05}, {"horizon", 200000}, {"samples", 4}},
                  "pass")}),
        "the blown-up circle map is minimal, not conjugate to a rotation, and factors onto "
        "the rotation almost one-to-one");

    add("scurve-geometry", json(),
        json::array({step("scurve-geometry",
                          {{"alphas", json::parse(R"([["plus","sqrt2",-1],["plus","sqrt3",-1]])")},
                           {"r0", json::array({1, 1000})},
                           {"window", 100},
                           {"grid", 8}},
                          "pass")}),
        "disjoint round discs with geometrically shrinking radii leave a dense complement");

    add("suspension-time-t", sys(R"(["suspension",["odometer",2,6],"sqrt2"])"),
        json::array(
            {step("minimality-scan", {{"eps", 0.25}, {"horizon", 100000}}, "pass"),
             step("minimality-scan",
                  {{"system", sys(R"(["suspension",["odometer",2,6],[1,2]])")}, {"eps", 0.1},
                   {"horizon", 100000}},
                  "fail")}),
        "time-t maps of the suspension are transitive for irrational t and periodic when t "
        "is compatible rational");

    add("td-ab-nonminimal", json(),
        json::array(
            {step("invariant-function",
                  {{"a", 2}, {"b", 3}, {"t0", "sqrt2"}, {"orbit_steps", 1000}, {"points", 1000}},
                  "pass"),
             step("minimality-scan",
                  {{"system",
                    sys(R"(["torus-rotation",[["scale",[2,1],"sqrt2"],["scale",[3,1],"sqrt2"]]])")},
                   {"eps", 0.05},
                   {"horizon", 100000}},
                  "fail")}),
        "the translation by (a*t0, b*t0) preserves b*s - a*s' exactly, so it is nonminimal");

    add("two-circles-skew", sys(R"(["two-circles-skew","sqrt2","sqrt3"])"),
        json::array({step("transitivity-scan", {{"eps", 0.25}, {"horizon", 20000}}, "pass")}),
        "the two-circle skew map with rationally independent angles is transitive");

    add("s3-translation-nonminimal", sys(R"(["s3-axis",["scale",[1,4],"sqrt2"]])"),
        json::array({step("minimality-scan",
                          {{"eps", 0.5}, {"horizon", 20000}, {"samples", 4}}, "fail")}),
        "left translation by a circle-subgroup element keeps orbits on cosets of that circle");

    add("flow-centralizer-time-t", json(),
        json::array({step("flow-frequency",
                          {{"direction", json::parse(R"([1,"sqrt2"])")},
                           {"count", 10},
                           {"eps", 0.2},
                           {"horizon", 20000},
                           {"samples", 2},
                           {"threshold", 0.8}},
                          "pass")}),
        "time-t maps of a minimal linear flow are minimal for typical t");

    return v;
  }();
  return cat;
}

const Experiment* find_experiment(const std::string& name) {
  for (const auto& e : gallery_catalog())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace minprod
