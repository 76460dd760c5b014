#include "minprod/cocycles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"

namespace minprod {

namespace {

constexpr std::size_t kMaxBaseDim = 16;
constexpr std::size_t kMaxFiberDim = 8;

// lift to (-1/2, 1/2]
double lift_half(double x) {
  double f = frac_double(x);
  return f > 0.5 ? f - 1.0 : f;
}

double table_lipschitz(const TransferTable& t) {
  double worst = 0.0;
  std::size_t nn = t.nodes();
  for (std::size_t i = 0; i < nn; ++i) {
    std::size_t j = (i + 1) & (nn - 1);
    for (std::size_t c = 0; c < t.dim; ++c)
      worst = std::max(worst, std::fabs(t.vals[j * t.dim + c] - t.vals[i * t.dim + c]));
  }
  return worst / t.mesh();
}

}  // namespace

void TransferTable::eval(double x, double* out) const {
  std::size_t nn = nodes();
  double u = frac_double(x) * static_cast<double>(nn);
  std::size_t i = static_cast<std::size_t>(u);
  if (i >= nn) i = nn - 1;
  double t = u - static_cast<double>(i);
  std::size_t j = (i + 1) & (nn - 1);
  for (std::size_t c = 0; c < dim; ++c) {
    double a = vals[i * dim + c];
    double b = vals[j * dim + c];
    out[c] = (t == 0.0 || a == b) ? a : a + t * (b - a);
  }
}

json TransferTable::to_json() const {
  json j;
  j["bits"] = bits;
  j["dim"] = dim;
  j["values"] = vals;
  return j;
}

TransferTable TransferTable::from_json(const json& j) {
  TransferTable t;
  t.bits = j.at("bits").get<std::size_t>();
  t.dim = j.at("dim").get<std::size_t>();
  t.vals = j.at("values").get<std::vector<double>>();
  if (t.vals.size() != t.nodes() * t.dim) throw ConfigError("transfer table size mismatch");
  return t;
}

Cocycle zero_cocycle(std::size_t dim) {
  Cocycle f;
  f.dim = dim;
  f.eval_num = [dim](const double*, double* out) { std::fill(out, out + dim, 0.0); };
  f.eval_sym = [dim](const SpacePoint&) { return std::vector<SymReal>(dim, SymReal(0)); };
  f.description = {{"kind", "zero"}, {"dim", dim}};
  f.is_zero = true;
  f.const_value = std::vector<SymReal>(dim, SymReal(0));
  return f;
}

Cocycle const_cocycle(std::vector<SymReal> c) {
  std::size_t dim = c.size();
  if (dim == 0) throw ConfigError("constant cocycle needs at least one coordinate");
  std::vector<SymReal> cf;
  std::vector<double> cd;
  bool zero = true;
  for (auto& v : c) {
    cf.push_back(sym_frac(v));
    cd.push_back(frac_double(cf.back().approx()));
    if (!identical(cf.back(), SymReal(0))) zero = false;
  }
  Cocycle f;
  f.dim = dim;
  f.eval_num = [cd, dim](const double*, double* out) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = cd[i];
  };
  f.eval_sym = [cf](const SpacePoint&) { return cf; };
  json vals = json::array();
  for (const auto& v : cf) vals.push_back(v.describe());
  f.description = {{"kind", "const"}, {"value", vals}};
  f.is_zero = zero;
  f.const_value = cf;
  return f;
}

Cocycle linear_cocycle(long m) {
  Cocycle f;
  f.dim = 1;
  f.eval_num = [m](const double* x, double* out) {
    out[0] = frac_double(static_cast<double>(m) * x[0]);
  };
  f.eval_sym = [m](const SpacePoint& p) {
    return std::vector<SymReal>{sym_frac(p.as<CirclePt>().s.scaled(m))};
  };
  f.description = {{"kind", "linear"}, {"m", m}};
  f.lipschitz = std::fabs(static_cast<double>(m));
  f.is_zero = (m == 0);
  if (m == 0) f.const_value = std::vector<SymReal>{SymReal(0)};
  return f;
}

Cocycle sine_cocycle(double kappa) {
  Cocycle f;
  f.dim = 1;
  f.eval_num = [kappa](const double* x, double* out) {
    out[0] = frac_double(0.5 + kappa * sinpi(2.0 * x[0]));
  };
  f.description = {{"kind", "sine"}, {"kappa", kappa}};
  f.lipschitz = 2.0 * M_PI * std::fabs(kappa);
  return f;
}

Cocycle anzai_cocycle() {
  Cocycle f = linear_cocycle(1);
  f.description = {{"kind", "anzai"}};
  return f;
}

Cocycle table_cocycle(std::shared_ptr<const TransferTable> t, json description) {
  if (!t) throw ConfigError("null transfer table");
  Cocycle f;
  f.dim = t->dim;
  f.eval_num = [t](const double* x, double* out) { t->eval(x[0], out); };
  f.description = std::move(description);
  f.lipschitz = table_lipschitz(*t);
  f.table = std::move(t);
  return f;
}

std::vector<SymReal> iterate_cocycle(const Cocycle& f, const SystemDescriptor& S,
                                     const SpacePoint& y, long n) {
  if (n < 1) throw ConfigError("iterated cocycle needs n >= 1");
  if (!f.eval_sym || !S.step) throw Error("no symbolic path for the iterated cocycle");
  std::vector<SymReal> acc(f.dim, SymReal(0));
  SpacePoint p = y;
  for (long i = 0; i < n; ++i) {
    auto vals = f.eval_sym(p);
    if (vals.size() != f.dim) throw Error("cocycle dimension mismatch");
    for (std::size_t c = 0; c < f.dim; ++c) acc[c] = acc[c] + vals[c];
    if (i + 1 < n) p = S.step(p);
  }
  for (auto& v : acc) v = sym_frac(v);
  return acc;
}

void iterate_cocycle_num(const Cocycle& f, const SystemDescriptor& S, const double* y, long n,
                         double* out) {
  if (n < 1) throw ConfigError("iterated cocycle needs n >= 1");
  std::size_t sd = S.space.dim;
  if (sd > kMaxBaseDim || f.dim > kMaxFiberDim) throw ConfigError("dimension above cap");
  double buf[kMaxBaseDim];
  double val[kMaxFiberDim];
  std::copy(y, y + sd, buf);
  double acc[kMaxFiberDim] = {0};
  for (long i = 0; i < n; ++i) {
    f.eval_num(buf, val);
    for (std::size_t c = 0; c < f.dim; ++c) acc[c] += val[c];
    if (i + 1 < n) S.step_num(buf);
  }
  for (std::size_t c = 0; c < f.dim; ++c) out[c] = frac_double(acc[c]);
}

Cocycle coboundary(const Cocycle& xi, const SystemDescriptor& S) {
  std::size_t sd = S.space.dim;
  std::size_t dim = xi.dim;
  if (sd > kMaxBaseDim || dim > kMaxFiberDim) throw ConfigError("dimension above cap");
  Cocycle r;
  r.dim = dim;
  auto ev = xi.eval_num;
  auto st = S.step_num;
  r.eval_num = [ev, st, sd, dim](const double* y, double* out) {
    double buf[kMaxBaseDim];
    double a[kMaxFiberDim];
    double b[kMaxFiberDim];
    std::copy(y, y + sd, buf);
    st(buf);
    ev(buf, a);
    ev(y, b);
    for (std::size_t c = 0; c < dim; ++c) out[c] = frac_double(a[c] - b[c]);
  };
  if (xi.eval_sym && S.step) {
    auto evs = xi.eval_sym;
    auto sts = S.step;
    r.eval_sym = [evs, sts, dim](const SpacePoint& p) {
      auto a = evs(sts(p));
      auto b = evs(p);
      std::vector<SymReal> out(dim, SymReal(0));
      for (std::size_t c = 0; c < dim; ++c) out[c] = sym_frac(a[c] - b[c]);
      return out;
    };
  }
  r.description = {{"kind", "coboundary"}, {"of", xi.description}};
  r.lipschitz = 2.0 * xi.lipschitz;
  if (xi.is_zero || xi.const_value) {
    r.is_zero = true;
    r.const_value = std::vector<SymReal>(dim, SymReal(0));
  }
  return r;
}

Report invariant_check(const Cocycle& f, std::size_t grid, double tol) {
  if (f.dim != 1) throw ConfigError("invariance check needs fiber dimension 1");
  double worst = 0.0;
  double worst_at = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(grid);
    double a, b;
    f.eval_num(&x, &a);
    double xs = frac_double(x + 0.5);
    f.eval_num(&xs, &b);
    double d = dist_to_int(a + b);
    if (d > worst) {
      worst = d;
      worst_at = x;
    }
  }
  Report rep;
  rep.op = "invariant-check";
  rep.params = {{"grid", grid}, {"tol", tol}};
  rep.evidence = {{"max_defect", worst}, {"argmax", worst_at}};
  rep.verdict = worst <= tol ? Verdict::pass : Verdict::fail;
  if (rep.verdict == Verdict::fail) rep.witness = {{"gamma", worst_at}, {"defect", worst}};
  return rep;
}

namespace {

// grows the cached forward orbit (circle positions) to the requested length
void ensure_orbit(std::vector<double>& orb, const SystemDescriptor& base, std::size_t len) {
  while (orb.size() < len) {
    double x = orb.back();
    base.step_num(&x);
    orb.push_back(x);
  }
}

double trapezoid(double d, double r) {
  double w = 2.0 * (1.0 - d / r);
  return std::min(1.0, std::max(0.0, w));
}

}  // namespace

Perturbation perturb_cocycle(const Cocycle& xi, double eps, const SystemDescriptor& base,
                             const SpacePoint& start, const Ball& base_window,
                             const Ball& group_window, long k, const PerturbOptions& opts) {
  if (base.space.kind != SpaceKind::Circle)
    throw ConstructionFailure("perturbation requires a circle base");
  if (eps <= 0.0) throw ConfigError("eps must be positive");
  if (k < 0) throw ConfigError("negative window time");
  std::size_t dim = group_window.center.size();
  if (dim == 0 || dim > kMaxFiberDim) throw ConfigError("bad group target dimension");
  if (xi.dim != dim) throw ConfigError("transfer dimension mismatch");
  if (base_window.center.size() != 1) throw ConfigError("base window must be a circle ball");
  if (base_window.radius <= 0.0 || group_window.radius <= 0.0)
    throw ConfigError("windows need positive radius");

  double scale = opts.symmetrize ? 2.0 : 1.0;
  std::size_t nn = std::size_t(1) << opts.grid_bits;
  double mesh = 1.0 / static_cast<double>(nn);

  std::vector<double> orbit{base.space.embed(start)[0]};
  ensure_orbit(orbit, base, static_cast<std::size_t>(k) + 2);
  if (arc_dist(orbit[k], base_window.center[0]) >= base_window.radius)
    throw ConfigError("orbit is not in the base window at the supplied time");

  std::vector<double> at_k(dim), at_kn(dim), g(dim);
  xi.eval_num(&orbit[k], at_k.data());

  long accepted_n = -1;
  long N = 0;
  double radius = 0.0;
  for (long n = 1; n <= opts.horizon; ++n) {
    ensure_orbit(orbit, base, static_cast<std::size_t>(k + n) + 1);
    if (arc_dist(orbit[k + n], base_window.center[0]) >= base_window.radius) continue;

    xi.eval_num(&orbit[k + n], at_kn.data());
    double gmax = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      g[c] = lift_half(group_window.center[c] - (at_kn[c] - at_k[c]));
      gmax = std::max(gmax, std::fabs(g[c]));
    }
    long cand_N = std::max<long>(1, static_cast<long>(std::ceil(2.0 * scale * gmax / eps)));
    if (n < cand_N) continue;
    ensure_orbit(orbit, base, static_cast<std::size_t>(k + n + cand_N) + 1);

    // pool: every anchor plus every painted region center (and, when the
    // antisymmetric copy is painted, the half-shift of each painted center)
    std::set<long> idx;
    for (long i = 0; i < cand_N; ++i) {
      idx.insert(i);
      idx.insert(k + i);
      idx.insert(k + n + i);
    }
    for (long m = k + n - cand_N + 1; m < k + n + cand_N; ++m) idx.insert(m);
    std::vector<double> pool;
    for (long m : idx) pool.push_back(orbit[m]);
    if (opts.symmetrize) {
      for (long m = k + n - cand_N + 1; m < k + n + cand_N; ++m)
        pool.push_back(frac_double(orbit[m] + 0.5));
    }
    std::sort(pool.begin(), pool.end());
    double dmin = 1.0 - pool.back() + pool.front();
    for (std::size_t i = 1; i < pool.size(); ++i)
      dmin = std::min(dmin, pool[i] - pool[i - 1]);
    double r = dmin / 3.0;
    double floor_r = std::max(4.0 * mesh, 4.0 * scale * gmax * mesh / eps);
    if (r < floor_r) continue;

    // committed evaluation points must stay strictly outside every new support
    bool blocked = false;
    for (long m = k + n - cand_N + 1; m < k + n + cand_N && !blocked; ++m) {
      for (double a : opts.avoid) {
        double d = arc_dist(orbit[m], a);
        if (opts.symmetrize) d = std::min(d, arc_dist(frac_double(orbit[m] + 0.5), a));
        if (d <= r + 2.0 * mesh + 1e-12) {
          blocked = true;
          break;
        }
      }
    }
    if (blocked) continue;

    accepted_n = n;
    N = cand_N;
    radius = r;
    break;
  }
  if (accepted_n < 0)
    throw ConstructionFailure("no admissible return time within the horizon");

  auto table = std::make_shared<TransferTable>();
  table->bits = opts.grid_bits;
  table->dim = dim;
  table->vals.assign(nn * dim, 0.0);

  double gmax = 0.0;
  for (std::size_t c = 0; c < dim; ++c) gmax = std::max(gmax, std::fabs(g[c]));
  if (gmax > 0.0) {
    // accumulate bump weights so plateaus sum to exactly N before scaling
    std::vector<double> wsum(nn, 0.0);
    for (long j = k + accepted_n; j < k + accepted_n + N; ++j) {
      for (long i = 0; i < N; ++i) {
        double c = orbit[j - i];
        long lo = static_cast<long>(std::floor((c - radius) * static_cast<double>(nn))) - 1;
        long hi = static_cast<long>(std::ceil((c + radius) * static_cast<double>(nn))) + 1;
        for (long u = lo; u <= hi; ++u) {
          double x = static_cast<double>(u) * mesh;
          double w = trapezoid(std::fabs(x - c), radius);
          if (w <= 0.0) continue;
          long uu = ((u % static_cast<long>(nn)) + static_cast<long>(nn)) % static_cast<long>(nn);
          wsum[static_cast<std::size_t>(uu)] += w;
        }
      }
    }
    for (std::size_t u = 0; u < nn; ++u) {
      if (wsum[u] == 0.0) continue;
      double rho = wsum[u] / static_cast<double>(N);
      for (std::size_t c = 0; c < dim; ++c)
        table->vals[u * dim + c] = rho * scale * g[c];
    }
    if (opts.symmetrize) {
      std::size_t half = nn / 2;
      std::vector<double> sym(nn * dim);
      for (std::size_t u = 0; u < nn; ++u) {
        std::size_t us = (u + half) & (nn - 1);
        for (std::size_t c = 0; c < dim; ++c)
          sym[u * dim + c] = 0.5 * (table->vals[u * dim + c] - table->vals[us * dim + c]);
      }
      table->vals = std::move(sym);
    }
  }

  Perturbation out;
  out.n = accepted_n;
  out.N = N;
  out.radius = radius;
  out.g = g;
  out.theta = table_cocycle(table, json{{"kind", "perturbation"},
                                        {"n", accepted_n},
                                        {"N", N},
                                        {"radius", radius},
                                        {"g", g},
                                        {"eps", eps},
                                        {"symmetrized", opts.symmetrize}});

  // post-hoc verification on the construction grid
  std::vector<double> th_k(dim), th_kn(dim);
  table->eval(orbit[k], th_k.data());
  table->eval(orbit[k + accepted_n], th_kn.data());
  double land_err = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    double landed = at_kn[c] + th_kn[c] - at_k[c] - th_k[c];
    land_err = std::max(land_err, dist_to_int(landed - group_window.center[c]));
  }
  double theta_at_k = 0.0;
  for (std::size_t c = 0; c < dim; ++c) theta_at_k = std::max(theta_at_k, std::fabs(th_k[c]));

  double ad = orbit[1] - orbit[0];
  double cob_sup = 0.0;
  std::vector<double> a(dim), b(dim);
  for (std::size_t u = 0; u < nn; ++u) {
    double x = static_cast<double>(u) * mesh;
    table->eval(frac_double(x + ad), a.data());
    table->eval(x, b.data());
    for (std::size_t c = 0; c < dim; ++c)
      cob_sup = std::max(cob_sup, std::fabs(a[c] - b[c]));
  }

  out.checks = {{"return_distance", arc_dist(orbit[k + accepted_n], base_window.center[0])},
                {"landing_error", land_err},
                {"theta_at_window_time", theta_at_k},
                {"coboundary_sup", cob_sup},
                {"eps", eps}};
  if (land_err > 1e-9) throw ConstructionFailure("perturbation landing verification failed");
  if (cob_sup >= eps) throw ConstructionFailure("perturbation coboundary bound violated");
  return out;
}

namespace {

struct PairProbe {
  bool hit = false;
  long time = -1;
  double margin = 0.0;
};

// earliest skew-orbit entry of pair.to when the fiber displacement is read
// off the transfer table: z_m = z0 + xi(p_m) - xi(p_0)
PairProbe probe_pair(const TransferTable& W, const SystemDescriptor& base,
                     const TransitivePair& pair, long horizon) {
  std::size_t dim = W.dim;
  std::vector<double> xi0(dim), xim(dim);
  double pos = pair.from.center[0];
  W.eval(pos, xi0.data());
  PairProbe out;
  for (long m = 1; m <= horizon; ++m) {
    base.step_num(&pos);
    double dbase = arc_dist(pos, pair.to.center[0]);
    if (dbase >= pair.to.radius) continue;
    W.eval(pos, xim.data());
    double d = dbase;
    for (std::size_t c = 0; c < dim; ++c) {
      double z = pair.from.center[1 + c] + xim[c] - xi0[c];
      d = std::max(d, dist_to_int(z - pair.to.center[1 + c]));
    }
    if (d < pair.to.radius) {
      out.hit = true;
      out.time = m;
      out.margin = pair.to.radius - d;
      return out;
    }
  }
  return out;
}

}  // namespace

BuildResult build_transitive_cocycle(const SystemDescriptor& base,
                                     const std::vector<TransitivePair>& pairs,
                                     const std::vector<double>& eps_schedule, long budget,
                                     const BuildOptions& opts) {
  if (base.space.kind != SpaceKind::Circle)
    throw ConstructionFailure("builder requires a circle base");
  if (eps_schedule.empty()) throw ConfigError("empty eps schedule");
  if (budget < 0) throw ConfigError("negative budget");

  std::size_t dim = 1;
  for (const auto& p : pairs) {
    if (p.from.center.size() < 2 || p.from.center.size() != p.to.center.size())
      throw ConfigError("pair balls must share a base+fiber shape");
    dim = p.from.center.size() - 1;
    if (dim > kMaxFiberDim) throw ConfigError("fiber dimension above cap");
  }

  TransferTable W;
  W.bits = opts.grid_bits;
  W.dim = dim;
  W.vals.assign(W.nodes() * dim, 0.0);

  struct St {
    bool covered = false;
    long time = -1;
    double margin = 0.0;
    long perturbs = 0;
    std::string note;
  };
  std::vector<St> st(pairs.size());
  std::vector<double> committed;
  long used = 0;
  long attempts = 0;
  const long attempts_cap = budget * 4 + 16;
  const double commit_min_margin = 1e-7;

  Cocycle xi_view;
  xi_view.dim = dim;
  xi_view.eval_num = [&W](const double* x, double* out) { W.eval(x[0], out); };

  bool all_covered = pairs.empty();
  while (!all_covered) {
    bool progress = false;
    all_covered = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (st[i].covered) continue;
      const auto& pr = pairs[i];

      auto probe = probe_pair(W, base, pr, opts.check_horizon);
      if (probe.hit && probe.margin > commit_min_margin) {
        st[i].covered = true;
        st[i].time = probe.time;
        st[i].margin = probe.margin;
        double p0 = pr.from.center[0];
        double pm = p0;
        for (long m = 0; m < probe.time; ++m) base.step_num(&pm);
        committed.push_back(p0);
        committed.push_back(pm);
        progress = true;
        continue;
      }
      all_covered = false;
      if (used >= budget || attempts >= attempts_cap) continue;

      // first entry time of the base orbit into the pair's target window
      double pos = pr.from.center[0];
      long k = -1;
      for (long m = 0; m <= opts.return_horizon; ++m) {
        if (arc_dist(pos, pr.to.center[0]) < pr.to.radius) {
          k = m;
          break;
        }
        base.step_num(&pos);
      }
      ++attempts;
      if (k < 0) {
        st[i].note = "base orbit misses the target window";
        continue;
      }

      std::vector<double> xi0(dim), xik(dim);
      double p0 = pr.from.center[0];
      W.eval(p0, xi0.data());
      W.eval(pos, xik.data());
      Ball gw;
      gw.radius = pr.to.radius;
      for (std::size_t c = 0; c < dim; ++c)
        gw.center.push_back(
            frac_double(pr.to.center[1 + c] - pr.from.center[1 + c] + xi0[c] - xik[c]));
      Ball bw{{pr.to.center[0]}, pr.to.radius};

      PerturbOptions po;
      po.horizon = opts.return_horizon;
      po.avoid = committed;
      po.symmetrize = opts.symmetrize;
      po.grid_bits = opts.grid_bits;
      double eps_j = eps_schedule[std::min<std::size_t>(used, eps_schedule.size() - 1)];

      try {
        SpacePoint start = circle_point(SymReal(Rational(p0)));
        auto P = perturb_cocycle(xi_view, eps_j, base, start, bw, gw, k, po);
        for (std::size_t u = 0; u < W.vals.size(); ++u) W.vals[u] += P.theta.table->vals[u];
        ++used;
        ++st[i].perturbs;
        long need = std::max(opts.check_horizon, k + P.n + 1);
        auto after = probe_pair(W, base, pr, need);
        if (!after.hit) throw ConstructionFailure("planted hit not found after perturbation");
        st[i].covered = true;
        st[i].time = after.time;
        st[i].margin = after.margin;
        double pm = pr.from.center[0];
        for (long m = 0; m < after.time; ++m) base.step_num(&pm);
        committed.push_back(pr.from.center[0]);
        committed.push_back(pm);
        progress = true;
      } catch (const ConstructionFailure& e) {
        st[i].note = e.what();
      }
    }
    if (all_covered || !progress) break;
  }

  BuildResult out;
  out.perturbations = used;
  out.complete = all_covered;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    json e = {{"pair", i},
              {"covered", st[i].covered},
              {"time", st[i].time},
              {"margin", st[i].margin},
              {"perturbations", st[i].perturbs}};
    if (!st[i].note.empty()) e["note"] = st[i].note;
    out.coverage.push_back(e);
  }
  auto shared = std::make_shared<TransferTable>(std::move(W));
  out.transfer = table_cocycle(shared, json{{"kind", "built-transfer"},
                                            {"perturbations", used},
                                            {"grid_bits", opts.grid_bits},
                                            {"symmetrized", opts.symmetrize},
                                            {"pairs", pairs.size()}});
  out.f = coboundary(out.transfer, base);
  return out;
}

}  // namespace minprod
