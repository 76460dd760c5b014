#include "minprod/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "minprod/errors.hpp"
#include "minprod/numutil.hpp"

namespace minprod {

namespace {

constexpr double kHitSlack = 1e-12;  // absorbs float jitter at ball boundaries

// Indices j in [0,m) whose grid point j/m might lie within eps of x (mod 1).
void grid_candidates(double x, double eps, long m, std::vector<long>& out) {
  out.clear();
  long lo = static_cast<long>(std::floor((x - eps) * m)) - 1;
  long hi = static_cast<long>(std::ceil((x + eps) * m)) + 1;
  if (hi - lo + 1 >= m) {
    for (long j = 0; j < m; ++j) out.push_back(j);
    return;
  }
  for (long j = lo; j <= hi; ++j) {
    long jm = ((j % m) + m) % m;
    out.push_back(jm);
  }
}

SymReal dyadic_unit(Rng& rng) {
  Rational r(Int(rng.bits() >> 11), Int(1) << 53);
  return SymReal(r);
}

}  // namespace

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::Circle: return "circle";
    case SpaceKind::Torus: return "torus";
    case SpaceKind::Cantor: return "cantor";
    case SpaceKind::Solenoid: return "solenoid";
    case SpaceKind::Denjoy: return "denjoy";
    case SpaceKind::Finite: return "finite";
    case SpaceKind::Quaternion: return "quaternion";
    case SpaceKind::Product: return "product";
    case SpaceKind::Klein: return "klein";
  }
  return "unknown";
}

SpaceKind SpacePoint::kind() const {
  switch (v.index()) {
    case 0: return SpaceKind::Circle;
    case 1: return SpaceKind::Torus;
    case 2: return SpaceKind::Cantor;
    case 3: return SpaceKind::Solenoid;
    case 4: return SpaceKind::Denjoy;
    case 5: return SpaceKind::Finite;
    case 6: return SpaceKind::Quaternion;
    case 7: return SpaceKind::Product;
    default: return SpaceKind::Klein;
  }
}

bool exactly_equal(const SpacePoint& a, const SpacePoint& b) {
  if (a.v.index() != b.v.index()) return false;
  switch (a.kind()) {
    case SpaceKind::Circle:
      return identical(a.as<CirclePt>().s, b.as<CirclePt>().s);
    case SpaceKind::Torus: {
      const auto& x = a.as<TorusPt>().c;
      const auto& y = b.as<TorusPt>().c;
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!identical(x[i], y[i])) return false;
      return true;
    }
    case SpaceKind::Cantor: {
      const auto& x = a.as<CantorPt>();
      const auto& y = b.as<CantorPt>();
      return x.base == y.base && x.w == y.w;
    }
    case SpaceKind::Solenoid: {
      const auto& x = a.as<SolenoidPt>();
      const auto& y = b.as<SolenoidPt>();
      return x.y.base == y.y.base && x.y.w == y.y.w && identical(x.s, y.s);
    }
    case SpaceKind::Denjoy: {
      const auto& x = a.as<DenjoyPt>();
      const auto& y = b.as<DenjoyPt>();
      return x.side == y.side && identical(x.pos, y.pos) &&
             (x.side == Side::none || x.idx == y.idx);
    }
    case SpaceKind::Finite: {
      const auto& x = a.as<FinitePt>();
      const auto& y = b.as<FinitePt>();
      return x.i == y.i && x.n == y.n;
    }
    case SpaceKind::Quaternion:
      return a.as<QuatPt>().q == b.as<QuatPt>().q;
    case SpaceKind::Product: {
      const auto& x = a.as<ProductPt>();
      const auto& y = b.as<ProductPt>();
      return exactly_equal(*x.a, *y.a) && exactly_equal(*x.b, *y.b);
    }
    case SpaceKind::Klein: {
      const auto& x = a.as<KleinPt>();
      const auto& y = b.as<KleinPt>();
      return identical(x.g, y.g) && identical(x.z, y.z);
    }
  }
  return false;
}

json point_to_json(const SpacePoint& p) {
  json j;
  j["kind"] = to_string(p.kind());
  switch (p.kind()) {
    case SpaceKind::Circle:
      j["s"] = p.as<CirclePt>().s.describe();
      j["approx"] = frac_double(p.as<CirclePt>().s.approx());
      break;
    case SpaceKind::Torus: {
      json c = json::array(), ap = json::array();
      for (const auto& s : p.as<TorusPt>().c) {
        c.push_back(s.describe());
        ap.push_back(frac_double(s.approx()));
      }
      j["coords"] = c;
      j["approx"] = ap;
      break;
    }
    case SpaceKind::Cantor: {
      const auto& cp = p.as<CantorPt>();
      j["base"] = cp.base;
      j["word"] = json(cp.w);
      break;
    }
    case SpaceKind::Solenoid: {
      const auto& sp = p.as<SolenoidPt>();
      j["word"] = json(sp.y.w);
      j["base"] = sp.y.base;
      j["height"] = sp.s.describe();
      break;
    }
    case SpaceKind::Denjoy: {
      const auto& dp = p.as<DenjoyPt>();
      j["pos"] = dp.pos.describe();
      j["approx"] = frac_double(dp.pos.approx());
      j["side"] = dp.side == Side::none ? "none" : (dp.side == Side::plus ? "plus" : "minus");
      if (dp.side != Side::none) j["orbit_index"] = dp.idx;
      break;
    }
    case SpaceKind::Finite:
      j["index"] = p.as<FinitePt>().i;
      j["cardinality"] = p.as<FinitePt>().n;
      break;
    case SpaceKind::Quaternion:
      j["q"] = json(p.as<QuatPt>().q);
      break;
    case SpaceKind::Product:
      j["left"] = point_to_json(*p.as<ProductPt>().a);
      j["right"] = point_to_json(*p.as<ProductPt>().b);
      break;
    case SpaceKind::Klein: {
      const auto& kp = p.as<KleinPt>();
      j["gamma"] = kp.g.describe();
      j["z"] = kp.z.describe();
      j["approx"] = {frac_double(kp.g.approx()), frac_double(kp.z.approx())};
      break;
    }
  }
  return j;
}

SpacePoint circle_point(SymReal s) { return SpacePoint{CirclePt{sym_frac(s)}}; }

SpacePoint torus_point(std::vector<SymReal> coords) {
  if (coords.empty()) throw ConfigError("torus point needs at least one coordinate");
  for (auto& s : coords) s = sym_frac(s);
  return SpacePoint{TorusPt{std::move(coords)}};
}

SpacePoint cantor_point(std::vector<std::uint8_t> word, std::uint32_t base) {
  if (base < 2) throw ConfigError("cantor base must be >= 2");
  for (auto d : word)
    if (d >= base) throw ConfigError("cantor digit out of range");
  return SpacePoint{CantorPt{std::move(word), base}};
}

SpacePoint solenoid_point(CantorPt y, SymReal height) {
  return SpacePoint{SolenoidPt{std::move(y), sym_frac(height)}};
}

SpacePoint denjoy_point(const std::shared_ptr<const DenjoyModel>& m, SymReal pos, Side side) {
  pos = sym_frac(pos);
  auto idx = m->marked_index(pos);
  if (side == Side::none) {
    if (idx) throw ConfigError("marked circle position needs side minus or plus");
    return SpacePoint{DenjoyPt{std::move(pos), Side::none, 0}};
  }
  if (!idx) throw ConfigError("side label on an unmarked circle position");
  return SpacePoint{DenjoyPt{std::move(pos), side, *idx}};
}

SpacePoint finite_point(long i, long n) {
  if (n < 1 || i < 0 || i >= n) throw ConfigError("finite point index out of range");
  return SpacePoint{FinitePt{i, n}};
}

SpacePoint quat_point(double w, double x, double y, double z) {
  double n2 = w * w + x * x + y * y + z * z;
  if (std::fabs(n2 - 1.0) > 2.5e-12) throw ConfigError("quaternion norm too far from 1");
  double inv = 1.0 / std::sqrt(n2);
  return SpacePoint{QuatPt{{w * inv, x * inv, y * inv, z * inv}}};
}

SpacePoint product_point(SpacePoint a, SpacePoint b) {
  return SpacePoint{ProductPt{std::make_shared<SpacePoint>(std::move(a)),
                              std::make_shared<SpacePoint>(std::move(b))}};
}

SpacePoint klein_point(SymReal g, SymReal z) {
  g = sym_frac(g);
  z = sym_frac(z);
  // canonical representative of {(g,z), (g+1/2, -z)} has g in [0, 1/2)
  if (sym_compare(g, SymReal(Rational(1, 2))) >= 0) {
    g = sym_frac(g - SymReal(Rational(1, 2)));
    z = sym_frac(-z);
  }
  return SpacePoint{KleinPt{std::move(g), std::move(z)}};
}

double SpaceDescriptor::metric(const SpacePoint& p, const SpacePoint& q) const {
  auto a = embed(p), b = embed(q);
  return metric_num(a.data(), b.data());
}

//
// circle
//

SpaceDescriptor circle_space(const BasisRegistry* reg) {
  SpaceDescriptor d;
  d.kind = SpaceKind::Circle;
  d.dim = 1;
  d.params = {{"space", "circle"}};
  d.metric_num = [](const double* a, const double* b) { return arc_dist(a[0], b[0]); };
  d.embed = [](const SpacePoint& p) {
    return std::vector<double>{frac_double(p.as<CirclePt>().s.approx())};
  };
  d.make_net = [](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    long m = static_cast<long>(std::ceil(1.0 / eps));
    NetIndexer net;
    net.eps = eps;
    net.dim = 1;
    for (long j = 0; j < m; ++j) {
      net.points.push_back(circle_point(SymReal(Rational(j, m))));
      net.coords.push_back(static_cast<double>(j) / m);
    }
    net.hit = [m, eps](const double* x, std::vector<std::size_t>& out) {
      std::vector<long> cand;
      grid_candidates(x[0], eps, m, cand);
      for (long j : cand)
        if (arc_dist(x[0], static_cast<double>(j) / m) <= eps + kHitSlack)
          out.push_back(static_cast<std::size_t>(j));
    };
    return net;
  };
  d.sampler = [](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(circle_point(SymReal(0)));
    while (out.size() < count) out.push_back(circle_point(dyadic_unit(rng)));
    out.resize(count);
    return out;
  };
  (void)reg;
  return d;
}

//
// torus
//

SpaceDescriptor torus_space(const BasisRegistry* reg, std::size_t n) {
  if (n == 0) throw ConfigError("torus dimension must be positive");
  SpaceDescriptor d;
  d.kind = SpaceKind::Torus;
  d.dim = n;
  d.params = {{"space", "torus"}, {"dim", n}};
  d.metric_num = [n](const double* a, const double* b) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, arc_dist(a[i], b[i]));
    return m;
  };
  d.embed = [n](const SpacePoint& p) {
    const auto& c = p.as<TorusPt>().c;
    if (c.size() != n) throw Error("torus point dimension mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = frac_double(c[i].approx());
    return out;
  };
  d.make_net = [n](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    long m = static_cast<long>(std::ceil(1.0 / eps));
    double total = std::pow(static_cast<double>(m), static_cast<double>(n));
    if (total > 2.0e6) throw ConfigError("torus net too large at this eps");
    NetIndexer net;
    net.eps = eps;
    net.dim = n;
    std::vector<long> idx(n, 0);
    for (;;) {
      std::vector<SymReal> c;
      for (std::size_t i = 0; i < n; ++i) c.emplace_back(Rational(idx[i], m));
      net.points.push_back(torus_point(std::move(c)));
      for (std::size_t i = 0; i < n; ++i)
        net.coords.push_back(static_cast<double>(idx[i]) / m);
      std::size_t i = 0;
      while (i < n && ++idx[i] == m) idx[i++] = 0;
      if (i == n) break;
    }
    net.hit = [n, m, eps](const double* x, std::vector<std::size_t>& out) {
      std::vector<std::vector<long>> cand(n);
      for (std::size_t i = 0; i < n; ++i) grid_candidates(x[i], eps, m, cand[i]);
      std::vector<std::size_t> pick(n, 0);
      for (;;) {
        double dist = 0;
        std::size_t flat = 0, stride = 1;
        for (std::size_t i = 0; i < n; ++i) {
          long j = cand[i][pick[i]];
          dist = std::max(dist, arc_dist(x[i], static_cast<double>(j) / m));
          flat += static_cast<std::size_t>(j) * stride;
          stride *= static_cast<std::size_t>(m);
        }
        if (dist <= eps + kHitSlack) out.push_back(flat);
        std::size_t i = 0;
        while (i < n && ++pick[i] == cand[i].size()) pick[i++] = 0;
        if (i == n) break;
      }
    };
    return net;
  };
  d.sampler = [n](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(torus_point(std::vector<SymReal>(n, SymReal(0))));
    while (out.size() < count) {
      std::vector<SymReal> c;
      for (std::size_t i = 0; i < n; ++i) c.push_back(dyadic_unit(rng));
      out.push_back(torus_point(std::move(c)));
    }
    out.resize(count);
    return out;
  };
  (void)reg;
  return d;
}

// index of a net word = sum of digit_i * b^i over the enumerated depth
namespace {

void cantor_block_hit(const double* x, double eps, std::uint32_t b, std::size_t k,
                      std::vector<std::size_t>& out) {
  // balls within eps of x are the net words agreeing with x to depth k_eps
  std::size_t k_eps = 0;
  double scale = 1.0;
  while (k_eps < k && scale > eps + kHitSlack) {
    scale *= 0.5;
    ++k_eps;
  }
  std::size_t base_idx = 0, stride = 1;
  for (std::size_t i = 0; i < k_eps; ++i) {
    base_idx += static_cast<std::size_t>(std::llround(x[i])) * stride;
    stride *= b;
  }
  std::size_t free_count = 1;
  for (std::size_t i = k_eps; i < k; ++i) free_count *= b;
  for (std::size_t t = 0; t < free_count; ++t) out.push_back(base_idx + t * stride);
}

double cantor_dist(const double* a, const double* b, std::size_t depth) {
  double scale = 1.0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (std::fabs(a[i] - b[i]) > 0.5) return scale;
    scale *= 0.5;
  }
  return 0.0;
}

std::size_t cantor_net_depth(double eps, std::size_t depth) {
  std::size_t k = 0;
  double scale = 1.0;
  while (k < depth && scale > eps) {
    scale *= 0.5;
    ++k;
  }
  return k;
}

std::vector<SpacePoint> cantor_net_points(std::uint32_t b, std::size_t depth, std::size_t k) {
  double total = std::pow(static_cast<double>(b), static_cast<double>(k));
  if (total > 2.0e6) throw ConfigError("cantor net too large at this eps");
  std::vector<SpacePoint> pts;
  std::vector<std::uint8_t> w(depth, 0);
  std::size_t count = static_cast<std::size_t>(total);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t r = t;
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = static_cast<std::uint8_t>(r % b);
      r /= b;
    }
    pts.push_back(cantor_point(w, b));
  }
  return pts;
}

}  // namespace

//
// cantor
//

SpaceDescriptor cantor_space(std::uint32_t base, std::size_t depth) {
  if (base < 2 || depth < 1) throw ConfigError("cantor space needs base >= 2, depth >= 1");
  SpaceDescriptor d;
  d.kind = SpaceKind::Cantor;
  d.dim = depth;
  d.params = {{"space", "cantor"}, {"base", base}, {"depth", depth}};
  d.metric_num = [depth](const double* a, const double* b) { return cantor_dist(a, b, depth); };
  d.embed = [depth](const SpacePoint& p) {
    const auto& cp = p.as<CantorPt>();
    if (cp.w.size() != depth) throw Error("cantor word depth mismatch");
    std::vector<double> out(depth);
    for (std::size_t i = 0; i < depth; ++i) out[i] = cp.w[i];
    return out;
  };
  d.make_net = [base, depth](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    std::size_t k = cantor_net_depth(eps, depth);
    NetIndexer net;
    net.eps = eps;
    net.dim = depth;
    net.points = cantor_net_points(base, depth, k);
    for (const auto& p : net.points) {
      for (auto dgt : p.as<CantorPt>().w) net.coords.push_back(dgt);
    }
    net.hit = [base, k, eps](const double* x, std::vector<std::size_t>& out) {
      cantor_block_hit(x, eps, base, k, out);
    };
    return net;
  };
  d.sampler = [base, depth](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(cantor_point(std::vector<std::uint8_t>(depth, 0), base));
    while (out.size() < count) {
      std::vector<std::uint8_t> w(depth);
      for (auto& dgt : w) dgt = static_cast<std::uint8_t>(rng.below(base));
      out.push_back(cantor_point(std::move(w), base));
    }
    out.resize(count);
    return out;
  };
  return d;
}

//
// solenoid (mapping torus of the gluing map)
//

SpaceDescriptor solenoid_space(std::uint32_t base, std::size_t depth,
                               std::function<void(double*)> glue_num,
                               std::function<void(double*)> unglue_num) {
  if (!glue_num || !unglue_num) throw ConfigError("solenoid space needs gluing maps");
  SpaceDescriptor d;
  d.kind = SpaceKind::Solenoid;
  d.dim = depth + 1;
  d.params = {{"space", "solenoid"}, {"base", base}, {"depth", depth}};
  d.metric_num = [depth, glue_num](const double* a, const double* b) {
    double sa = a[depth], sb = b[depth];
    double direct = std::max(cantor_dist(a, b, depth), std::fabs(sa - sb));
    std::vector<double> g(a, a + depth);
    glue_num(g.data());
    double up = std::max(cantor_dist(g.data(), b, depth), (1.0 - sa) + sb);
    g.assign(b, b + depth);
    glue_num(g.data());
    double down = std::max(cantor_dist(a, g.data(), depth), (1.0 - sb) + sa);
    return std::min(1.0, std::min(direct, std::min(up, down)));
  };
  d.embed = [depth](const SpacePoint& p) {
    const auto& sp = p.as<SolenoidPt>();
    if (sp.y.w.size() != depth) throw Error("solenoid word depth mismatch");
    std::vector<double> out(depth + 1);
    for (std::size_t i = 0; i < depth; ++i) out[i] = sp.y.w[i];
    out[depth] = frac_double(sp.s.approx());
    return out;
  };
  d.make_net = [base, depth, glue_num, unglue_num](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    std::size_t k = cantor_net_depth(eps, depth);
    long m = static_cast<long>(std::ceil(1.0 / eps));
    auto words = cantor_net_points(base, depth, k);
    NetIndexer net;
    net.eps = eps;
    net.dim = depth + 1;
    for (const auto& wp : words) {
      for (long j = 0; j < m; ++j) {
        net.points.push_back(
            solenoid_point(wp.as<CantorPt>(), SymReal(Rational(j, m))));
        for (auto dgt : wp.as<CantorPt>().w) net.coords.push_back(dgt);
        net.coords.push_back(static_cast<double>(j) / m);
      }
    }
    std::size_t mm = static_cast<std::size_t>(m);
    auto metric_fn = [depth, glue_num](const double* a, const double* b) {
      double sa = a[depth], sb = b[depth];
      double direct = std::max(cantor_dist(a, b, depth), std::fabs(sa - sb));
      std::vector<double> g(a, a + depth);
      glue_num(g.data());
      double up = std::max(cantor_dist(g.data(), b, depth), (1.0 - sa) + sb);
      g.assign(b, b + depth);
      glue_num(g.data());
      double down = std::max(cantor_dist(a, g.data(), depth), (1.0 - sb) + sa);
      return std::min(1.0, std::min(direct, std::min(up, down)));
    };
    net.hit = [base, depth, k, mm, eps, glue_num, unglue_num, metric_fn](
                  const double* x, std::vector<std::size_t>& out) {
      std::vector<double> buf(x, x + depth + 1);
      // digit groups reachable directly, via one wrap up, or one wrap down
      std::vector<std::vector<std::size_t>> groups;
      groups.emplace_back();
      cantor_block_hit(buf.data(), eps, base, k, groups.back());
      std::vector<double> gup(x, x + depth);
      glue_num(gup.data());
      groups.emplace_back();
      cantor_block_hit(gup.data(), eps, base, k, groups.back());
      std::vector<double> gdn(x, x + depth);
      unglue_num(gdn.data());
      groups.emplace_back();
      cantor_block_hit(gdn.data(), eps, base, k, groups.back());
      std::vector<std::size_t> digit_idx;
      for (const auto& g : groups)
        digit_idx.insert(digit_idx.end(), g.begin(), g.end());
      std::sort(digit_idx.begin(), digit_idx.end());
      digit_idx.erase(std::unique(digit_idx.begin(), digit_idx.end()), digit_idx.end());
      // reconstruct candidate centers and verify with the true metric
      std::vector<double> cen(depth + 1);
      for (std::size_t di : digit_idx) {
        std::size_t r = di;
        std::fill(cen.begin(), cen.end(), 0.0);
        for (std::size_t i = 0; i < k; ++i) {
          cen[i] = static_cast<double>(r % base);
          r /= base;
        }
        for (std::size_t j = 0; j < mm; ++j) {
          cen[depth] = static_cast<double>(j) / static_cast<double>(mm);
          if (metric_fn(x, cen.data()) <= eps + kHitSlack)
            out.push_back(di * mm + j);
        }
      }
    };
    return net;
  };
  d.sampler = [base, depth](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(solenoid_point(CantorPt{std::vector<std::uint8_t>(depth, 0), base}, SymReal(0)));
    while (out.size() < count) {
      std::vector<std::uint8_t> w(depth);
      for (auto& dgt : w) dgt = static_cast<std::uint8_t>(rng.below(base));
      out.push_back(solenoid_point(CantorPt{std::move(w), base}, dyadic_unit(rng)));
    }
    out.resize(count);
    return out;
  };
  return d;
}

//
// denjoy model and space
//

Rational DenjoyModel::gap_len(long n) const {
  Rational scale = c * (1 - c);
  long a = n < 0 ? -n : n;
  return scale / (Int(1) << a);
}

SymReal DenjoyModel::marked_point(long n) const {
  if (n < -W || n > W) throw WindowOverflow("marked orbit index outside the tracked window");
  return sym_frac(alpha.scaled(Rational(n)));
}

std::optional<long> DenjoyModel::marked_index(const SymReal& pos) const {
  if (alpha.coeffs().empty()) return std::nullopt;
  auto [gen, cg] = alpha.coeffs().front();
  Rational n_rat = pos.coeff_of(gen) / cg;
  if (denominator(n_rat) != 1) return std::nullopt;
  Int n_int = numerator(n_rat);
  if (n_int < -W || n_int > W) return std::nullopt;
  long n = static_cast<long>(n_int);
  if (!identical(pos, marked_point(n))) return std::nullopt;
  return n;
}

double DenjoyModel::embed_e(double pos, int side, long idx) const {
  (void)idx;
  auto it = std::lower_bound(xs_sorted.begin(), xs_sorted.end(), pos);
  std::size_t j = static_cast<std::size_t>(it - xs_sorted.begin());
  double e = pos * (1.0 - L) + gap_prefix[j];
  if (side > 0) {
    if (it == xs_sorted.end() || *it != pos)
      throw Error("plus side requested at an unmarked position");
    e += gap_sorted[j];
  }
  return e;
}

SpaceDescriptor denjoy_space(const std::shared_ptr<const DenjoyModel>& m) {
  if (!m) throw ConfigError("denjoy space needs a model");
  SpaceDescriptor d;
  d.kind = SpaceKind::Denjoy;
  d.dim = 4;  // (order coordinate e, circle position, side, orbit index)
  d.params = {{"space", "denjoy"},
              {"gap_scale", to_double(m->c)},
              {"window", m->W}};
  // the order coordinate fills [0, 1) exactly (Cantor mass 1-L plus gap mass
  // L), so distances wrap: the cut at the gap of marked point 0 is not a
  // boundary of the space
  d.metric_num = [](const double* a, const double* b) { return arc_dist(a[0], b[0]); };
  d.embed = [m](const SpacePoint& p) {
    const auto& dp = p.as<DenjoyPt>();
    double pos;
    int side = static_cast<int>(dp.side);
    if (dp.side != Side::none) {
      // read the exact table value so marked positions match net centers bitwise
      auto it = std::find(m->idx_sorted.begin(), m->idx_sorted.end(), dp.idx);
      pos = m->xs_sorted[static_cast<std::size_t>(it - m->idx_sorted.begin())];
    } else {
      pos = frac_double(dp.pos.approx());
    }
    return std::vector<double>{m->embed_e(pos, side, dp.idx), pos,
                               static_cast<double>(side), static_cast<double>(dp.idx)};
  };
  d.make_net = [m](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    long grid = static_cast<long>(std::ceil(4.0 / eps));
    double tail_target = eps / 4.0;
    long n_eps = 0;
    double tail = 2.0 * to_double(m->c * (1 - m->c));
    while (n_eps < m->W && tail > tail_target) {
      tail *= 0.5;
      ++n_eps;
    }
    NetIndexer net;
    net.eps = eps;
    net.dim = 4;
    std::vector<std::pair<double, SpacePoint>> staged;
    for (long j = 0; j < grid; ++j) {
      SymReal pos(Rational(j, grid));
      if (m->marked_index(pos)) continue;  // only j=0 can collide (orbit is irrational)
      SpacePoint p{DenjoyPt{pos, Side::none, 0}};
      staged.emplace_back(m->embed_e(static_cast<double>(j) / grid, 0, 0), std::move(p));
    }
    for (long n = -n_eps; n <= n_eps; ++n) {
      for (Side s : {Side::minus, Side::plus}) {
        SpacePoint p{DenjoyPt{m->marked_point(n), s, n}};
        auto it = std::find(m->idx_sorted.begin(), m->idx_sorted.end(), n);
        double pos = m->xs_sorted[static_cast<std::size_t>(it - m->idx_sorted.begin())];
        staged.emplace_back(m->embed_e(pos, static_cast<int>(s), n), std::move(p));
      }
    }
    std::sort(staged.begin(), staged.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto evals = std::make_shared<std::vector<double>>();
    for (auto& [e, p] : staged) {
      evals->push_back(e);
      net.points.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < net.points.size(); ++i) {
      net.coords.push_back((*evals)[i]);
      const auto& dp = net.points[i].as<DenjoyPt>();
      double pos = dp.side == Side::none
                       ? frac_double(dp.pos.approx())
                       : m->xs_sorted[static_cast<std::size_t>(
                             std::find(m->idx_sorted.begin(), m->idx_sorted.end(), dp.idx) -
                             m->idx_sorted.begin())];
      net.coords.push_back(pos);
      net.coords.push_back(static_cast<double>(static_cast<int>(dp.side)));
      net.coords.push_back(static_cast<double>(dp.idx));
    }
    net.hit = [evals, eps](const double* x, std::vector<std::size_t>& out) {
      auto push_range = [&](double lo, double hi) {
        auto it0 = std::lower_bound(evals->begin(), evals->end(), lo);
        auto it1 = std::upper_bound(evals->begin(), evals->end(), hi);
        for (auto it = it0; it != it1; ++it)
          out.push_back(static_cast<std::size_t>(it - evals->begin()));
      };
      double r = eps + kHitSlack;
      if (2.0 * r >= 1.0) {
        for (std::size_t i = 0; i < evals->size(); ++i) out.push_back(i);
        return;
      }
      double lo = x[0] - r, hi = x[0] + r;
      push_range(std::max(lo, 0.0), std::min(hi, 1.0));
      if (lo < 0.0) push_range(lo + 1.0, 1.0);
      if (hi > 1.0) push_range(0.0, hi - 1.0);
    };
    return net;
  };
  d.sampler = [m](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(SpacePoint{DenjoyPt{m->marked_point(0), Side::minus, 0}});
    while (out.size() < count) {
      if (out.size() % 4 == 3) {
        long n = rng.range(-m->W, m->W);
        Side s = (rng.bits() & 1) ? Side::plus : Side::minus;
        out.push_back(SpacePoint{DenjoyPt{m->marked_point(n), s, n}});
      } else {
        SymReal pos = dyadic_unit(rng);
        if (m->marked_index(pos)) continue;
        out.push_back(SpacePoint{DenjoyPt{std::move(pos), Side::none, 0}});
      }
    }
    out.resize(count);
    return out;
  };
  return d;
}

//
// finite
//

SpaceDescriptor finite_space(long n) {
  if (n < 1) throw ConfigError("finite space needs at least one point");
  SpaceDescriptor d;
  d.kind = SpaceKind::Finite;
  d.dim = 1;
  d.params = {{"space", "finite"}, {"cardinality", n}};
  d.metric_num = [](const double* a, const double* b) {
    return std::fabs(a[0] - b[0]) < 0.5 ? 0.0 : 1.0;
  };
  d.embed = [](const SpacePoint& p) {
    return std::vector<double>{static_cast<double>(p.as<FinitePt>().i)};
  };
  d.make_net = [n](double eps) {
    NetIndexer net;
    net.eps = eps;
    net.dim = 1;
    for (long i = 0; i < n; ++i) {
      net.points.push_back(finite_point(i, n));
      net.coords.push_back(static_cast<double>(i));
    }
    net.hit = [n, eps](const double* x, std::vector<std::size_t>& out) {
      long i = std::lround(x[0]);
      if (i >= 0 && i < n) {
        out.push_back(static_cast<std::size_t>(i));
        if (eps >= 1.0)
          for (long j = 0; j < n; ++j)
            if (j != i) out.push_back(static_cast<std::size_t>(j));
      }
    };
    return net;
  };
  d.sampler = [n](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(finite_point(0, n));
    while (out.size() < count)
      out.push_back(finite_point(static_cast<long>(rng.below(static_cast<std::uint64_t>(n))), n));
    out.resize(count);
    return out;
  };
  return d;
}

//
// unit quaternions (the 3-sphere), chordal metric
//

SpaceDescriptor s3_space() {
  SpaceDescriptor d;
  d.kind = SpaceKind::Quaternion;
  d.dim = 4;
  d.params = {{"space", "s3"}};
  d.metric_num = [](const double* a, const double* b) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  d.embed = [](const SpacePoint& p) {
    const auto& q = p.as<QuatPt>().q;
    return std::vector<double>(q.begin(), q.end());
  };
  d.make_net = [](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    NetIndexer net;
    net.eps = eps;
    net.dim = 4;
    auto push = [&net](double w, double x, double y, double z) {
      net.points.push_back(quat_point(w, x, y, z));
      const auto& q = net.points.back().as<QuatPt>().q;
      for (double v : q) net.coords.push_back(v);
    };
    // exact coordinate-axis points first so ties in witness selection are stable
    for (int i = 0; i < 4; ++i)
      for (int s : {1, -1}) {
        double q[4] = {0, 0, 0, 0};
        q[i] = s;
        push(q[0], q[1], q[2], q[3]);
      }
    double h = eps / 2.0;
    long n1 = std::max<long>(1, static_cast<long>(std::ceil(M_PI / h)));
    for (long i1 = 0; i1 <= n1; ++i1) {
      double p1 = M_PI * i1 / n1;
      long n2 = std::max<long>(1, static_cast<long>(std::ceil(M_PI / h)));
      for (long i2 = 0; i2 <= n2; ++i2) {
        double p2 = M_PI * i2 / n2;
        long n3 = std::max<long>(1, static_cast<long>(std::ceil(2.0 * M_PI / h)));
        for (long i3 = 0; i3 < n3; ++i3) {
          double p3 = 2.0 * M_PI * i3 / n3;
          push(std::cos(p1), std::sin(p1) * std::cos(p2),
               std::sin(p1) * std::sin(p2) * std::cos(p3),
               std::sin(p1) * std::sin(p2) * std::sin(p3));
          if (i2 == 0 || i2 == n2) break;  // meridian collapses at the poles
        }
        if (i1 == 0 || i1 == n1) break;
      }
    }
    auto coords = std::make_shared<std::vector<double>>(net.coords);
    std::size_t cnt = net.points.size();
    net.hit = [coords, cnt, eps](const double* x, std::vector<std::size_t>& out) {
      const double* c = coords->data();
      double lim = (eps + kHitSlack) * (eps + kHitSlack);
      for (std::size_t i = 0; i < cnt; ++i) {
        const double* q = c + 4 * i;
        double dw = x[0] - q[0];
        if (dw * dw > lim) continue;
        double s = dw * dw;
        for (int t = 1; t < 4; ++t) {
          double dv = x[t] - q[t];
          s += dv * dv;
        }
        if (s <= lim) out.push_back(i);
      }
    };
    return net;
  };
  d.sampler = [](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(quat_point(1, 0, 0, 0));
    while (out.size() < count) {
      double q[4];
      double n2 = 0;
      do {
        n2 = 0;
        for (auto& v : q) {
          v = rng.gaussian();
          n2 += v * v;
        }
      } while (n2 < 1e-12);
      double inv = 1.0 / std::sqrt(n2);
      out.push_back(quat_point(q[0] * inv, q[1] * inv, q[2] * inv, q[3] * inv));
    }
    out.resize(count);
    return out;
  };
  return d;
}

//
// product
//

SpaceDescriptor product_space(const SpaceDescriptor& a, const SpaceDescriptor& b) {
  SpaceDescriptor d;
  d.kind = SpaceKind::Product;
  d.dim = a.dim + b.dim;
  d.params = {{"space", "product"}, {"left", a.params}, {"right", b.params}};
  std::size_t da = a.dim;
  auto ma = a.metric_num, mb = b.metric_num;
  d.metric_num = [da, ma, mb](const double* x, const double* y) {
    return std::max(ma(x, y), mb(x + da, y + da));
  };
  auto ea = a.embed, eb = b.embed;
  d.embed = [ea, eb](const SpacePoint& p) {
    const auto& pp = p.as<ProductPt>();
    auto va = ea(*pp.a);
    auto vb = eb(*pp.b);
    va.insert(va.end(), vb.begin(), vb.end());
    return va;
  };
  auto na = a.make_net, nb = b.make_net;
  d.make_net = [na, nb, da](double eps) {
    auto ia = std::make_shared<NetIndexer>(na(eps));
    auto ib = std::make_shared<NetIndexer>(nb(eps));
    if (static_cast<double>(ia->size()) * static_cast<double>(ib->size()) > 4.0e6)
      throw ConfigError("product net too large at this eps");
    NetIndexer net;
    net.eps = eps;
    net.dim = ia->dim + ib->dim;
    for (std::size_t i = 0; i < ia->size(); ++i) {
      for (std::size_t j = 0; j < ib->size(); ++j) {
        net.points.push_back(product_point(ia->points[i], ib->points[j]));
        const double* ca = ia->center(i);
        const double* cb = ib->center(j);
        net.coords.insert(net.coords.end(), ca, ca + ia->dim);
        net.coords.insert(net.coords.end(), cb, cb + ib->dim);
      }
    }
    std::size_t nbsz = ib->size();
    net.hit = [ia, ib, nbsz, da](const double* x, std::vector<std::size_t>& out) {
      std::vector<std::size_t> la, lb;
      ia->hit(x, la);
      ib->hit(x + da, lb);
      for (std::size_t i : la)
        for (std::size_t j : lb) out.push_back(i * nbsz + j);
    };
    return net;
  };
  auto sa = a.sampler, sb = b.sampler;
  d.sampler = [sa, sb](std::size_t count, std::uint64_t seed) {
    auto pa = sa(count, seed * 2 + 1);
    auto pb = sb(count, seed * 2 + 2);
    std::vector<SpacePoint> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(product_point(pa[i], pb[i]));
    return out;
  };
  return d;
}

//
// Klein bottle as the quotient of the 2-torus by (g,z) ~ (g+1/2, -z)
//

namespace {

double klein_dist(const double* a, const double* b) {
  double direct = std::max(arc_dist(a[0], b[0]), arc_dist(a[1], b[1]));
  double flipped = std::max(arc_dist(a[0] + 0.5, b[0]), arc_dist(1.0 - a[1], b[1]));
  return std::min(direct, flipped);
}

}  // namespace

SpaceDescriptor klein_space(const BasisRegistry* reg) {
  SpaceDescriptor d;
  d.kind = SpaceKind::Klein;
  d.dim = 2;
  d.params = {{"space", "klein"}};
  d.metric_num = [](const double* a, const double* b) { return klein_dist(a, b); };
  d.embed = [](const SpacePoint& p) {
    const auto& kp = p.as<KleinPt>();
    return std::vector<double>{frac_double(kp.g.approx()), frac_double(kp.z.approx())};
  };
  d.make_net = [](double eps) {
    if (eps <= 0) throw ConfigError("net eps must be positive");
    long m = static_cast<long>(std::ceil(1.0 / eps));
    NetIndexer net;
    net.eps = eps;
    net.dim = 2;
    std::map<std::pair<Rational, Rational>, bool> seen;
    for (long i = 0; i < m; ++i) {
      for (long j = 0; j < m; ++j) {
        SpacePoint p = klein_point(SymReal(Rational(i, m)), SymReal(Rational(j, m)));
        const auto& kp = p.as<KleinPt>();
        auto key = std::make_pair(kp.g.rational_part(), kp.z.rational_part());
        if (seen.count(key)) continue;
        seen[key] = true;
        net.coords.push_back(frac_double(kp.g.approx()));
        net.coords.push_back(frac_double(kp.z.approx()));
        net.points.push_back(std::move(p));
      }
    }
    auto coords = std::make_shared<std::vector<double>>(net.coords);
    std::size_t cnt = net.points.size();
    net.hit = [coords, cnt, eps](const double* x, std::vector<std::size_t>& out) {
      const double* c = coords->data();
      for (std::size_t i = 0; i < cnt; ++i)
        if (klein_dist(x, c + 2 * i) <= eps + kHitSlack) out.push_back(i);
    };
    return net;
  };
  d.sampler = [](std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SpacePoint> out;
    out.push_back(klein_point(SymReal(0), SymReal(0)));
    while (out.size() < count) out.push_back(klein_point(dyadic_unit(rng), dyadic_unit(rng)));
    out.resize(count);
    return out;
  };
  (void)reg;
  return d;
}

}  // namespace minprod
