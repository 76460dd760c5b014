#include "minprod/symreal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minprod/numutil.hpp"

namespace minprod {

namespace {

Rational pow2_inv(int k) {  // 2^-k
  Int p = Int(1) << k;
  return Rational(1, p);
}

// Smallest k with 2^-k <= eps.
int bits_for(const Rational& eps) {
  int k = 0;
  Rational w = 1;
  while (w > eps) {
    w /= 2;
    ++k;
    if (k > 100000) throw Error("enclosure width request is unreasonably small");
  }
  return k;
}

RatInterval sqrt_enclosure(const Int& n, const Rational& eps) {
  int k = bits_for(eps);
  Int scaled = n << (2 * k);
  Int s = boost::multiprecision::sqrt(scaled);  // floor square root
  Int den = Int(1) << k;
  return {Rational(s, den), Rational(s + 1, den)};
}

// Alternating series for arctan(1/x), bracketed by consecutive partial sums.
RatInterval arctan_inv_enclosure(long x, const Rational& eps) {
  Rational sum = 0;
  Rational term = Rational(1, x);
  Rational x2 = Rational(1, Int(x) * x);
  long j = 0;
  while (term > eps) {
    sum += (j % 2 == 0) ? term : Rational(-term);
    term *= x2;
    term = term * Rational(2 * j + 1, 2 * j + 3);
    ++j;
  }
  // True value lies between sum and sum +/- term depending on parity.
  if (j % 2 == 0) return {sum, sum + term};
  return {sum - term, sum};
}

RatInterval pi_enclosure(const Rational& eps) {
  RatInterval a = arctan_inv_enclosure(5, eps / 64);
  RatInterval b = arctan_inv_enclosure(239, eps / 16);
  return {16 * a.lo - 4 * b.hi, 16 * a.hi - 4 * b.lo};
}

}  // namespace

BasisRegistry::Oracle BasisRegistry::catalog_oracle(const std::string& name) {
  if (name == "sqrt2") return [](const Rational& e) { return sqrt_enclosure(2, e); };
  if (name == "sqrt3") return [](const Rational& e) { return sqrt_enclosure(3, e); };
  if (name == "sqrt5") return [](const Rational& e) { return sqrt_enclosure(5, e); };
  if (name == "golden") {
    return [](const Rational& e) {
      RatInterval s5 = sqrt_enclosure(5, e);  // (1+sqrt5)/2, width halves
      return RatInterval{(1 + s5.lo) / 2, (1 + s5.hi) / 2};
    };
  }
  if (name == "pi") return [](const Rational& e) { return pi_enclosure(e); };
  throw Error("unknown catalog generator: " + name);
}

BasisRegistry::BasisRegistry(const std::vector<std::string>& catalog_names) {
  for (const auto& n : catalog_names) add_named(n);
}

std::size_t BasisRegistry::add(std::string name, Oracle oracle) {
  std::lock_guard<std::mutex> lk(mu_);
  for (const auto& g : gens_)
    if (g.name == name) throw Error("generator already registered: " + name);
  Gen g;
  g.name = std::move(name);
  g.oracle = std::move(oracle);
  g.best = g.oracle(pow2_inv(120));
  if (g.best.lo > g.best.hi) throw Error("oracle returned an empty interval");
  double lo = to_double(g.best.lo), hi = to_double(g.best.hi);
  g.mid = 0.5 * (lo + hi);
  g.err = (hi - lo) + std::fabs(g.mid) * 0x1p-50 + 1e-300;
  gens_.push_back(std::move(g));
  return gens_.size() - 1;
}

std::size_t BasisRegistry::add_named(const std::string& catalog_name) {
  return add(catalog_name, catalog_oracle(catalog_name));
}

std::optional<std::size_t> BasisRegistry::find(const std::string& name) const {
  std::lock_guard<std::mutex> lk(mu_);
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return i;
  return std::nullopt;
}

RatInterval BasisRegistry::enclosure(std::size_t i, const Rational& eps) const {
  if (eps <= 0) throw Error("enclosure width must be positive");
  std::lock_guard<std::mutex> lk(mu_);
  Gen& g = const_cast<Gen&>(gens_.at(i));
  if (g.best.width() <= eps) return g.best;
  g.best = g.best.intersect(g.oracle(eps));
  return g.best;
}

SymReal::SymReal(Rational r) : rat_(std::move(r)) { compute_approx(); }

SymReal::SymReal(const BasisRegistry* reg, Rational r, Coeffs coeffs)
    : reg_(reg), rat_(std::move(r)), coeffs_(std::move(coeffs)) {
  normalize();
  if (!coeffs_.empty() && !reg_) throw Error("generator coefficients need a registry");
  compute_approx();
}

SymReal SymReal::generator(const BasisRegistry& reg, std::size_t index, const Rational& coeff) {
  if (index >= reg.size()) throw Error("generator index out of range");
  return SymReal(&reg, 0, {{static_cast<std::uint32_t>(index), coeff}});
}

Rational SymReal::coeff_of(std::uint32_t gen_index) const {
  for (const auto& [i, c] : coeffs_)
    if (i == gen_index) return c;
  return 0;
}

void SymReal::normalize() {
  std::sort(coeffs_.begin(), coeffs_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Coeffs out;
  for (auto& [i, c] : coeffs_) {
    if (c == 0) continue;
    if (!out.empty() && out.back().first == i)
      out.back().second += c;
    else
      out.emplace_back(i, c);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const auto& p) { return p.second == 0; }),
            out.end());
  coeffs_ = std::move(out);
}

void SymReal::compute_approx() {
  double a = to_double(rat_);
  double mag = std::fabs(a);
  double e = 0.0;
  for (const auto& [i, c] : coeffs_) {
    double cd = to_double(c);
    double term = cd * reg_->approx(i);
    a += term;
    mag += std::fabs(term);
    e += std::fabs(cd) * reg_->approx_err(i) + std::fabs(cd) * 0x1p-52;
  }
  approx_ = a;
  err_ = e + mag * 0x1p-48 + 1e-300;
}

const BasisRegistry* SymReal::merge_registries(const SymReal& a, const SymReal& b) {
  if (a.reg_ && b.reg_ && a.reg_ != b.reg_)
    throw Error("cannot combine values from different registries");
  return a.reg_ ? a.reg_ : b.reg_;
}

SymReal SymReal::operator+(const SymReal& o) const {
  Coeffs c = coeffs_;
  c.insert(c.end(), o.coeffs_.begin(), o.coeffs_.end());
  return SymReal(merge_registries(*this, o), rat_ + o.rat_, std::move(c));
}

SymReal SymReal::operator-(const SymReal& o) const { return *this + (-o); }

SymReal SymReal::operator-() const {
  Coeffs c = coeffs_;
  for (auto& [i, v] : c) v = -v;
  return SymReal(reg_, -rat_, std::move(c));
}

SymReal SymReal::scaled(const Rational& k) const {
  Coeffs c = coeffs_;
  for (auto& [i, v] : c) v *= k;
  return SymReal(reg_, rat_ * k, std::move(c));
}

std::string SymReal::describe() const {
  std::ostringstream os;
  os << rat_;
  for (const auto& [i, c] : coeffs_) {
    if (c >= 0)
      os << " + " << c;
    else
      os << " - " << Rational(-c);
    os << "*" << reg_->name(i);
  }
  return os.str();
}

RatInterval sym_eval(const SymReal& x, const Rational& eps) {
  if (eps <= 0) throw Error("sym_eval needs a positive width");
  RatInterval acc{x.rational_part(), x.rational_part()};
  const auto& cs = x.coeffs();
  if (cs.empty()) return acc;
  Rational share = eps / Rational(static_cast<long>(cs.size()));
  for (const auto& [i, c] : cs) {
    Rational w = share / abs_rat(c);
    acc = acc + x.registry()->enclosure(i, w).scaled(c);
  }
  return acc;
}

Int sym_floor(const SymReal& x, const Rational& min_width) {
  if (x.is_rational()) return floor_rat(x.rational_part());
  // Fast path: the cached double interval decides almost always.
  double lo = x.approx() - x.approx_err(), hi = x.approx() + x.approx_err();
  double fl = std::floor(lo), fh = std::floor(hi);
  if (fl == fh && std::fabs(fl) < 0x1p53) return Int(static_cast<long long>(fl));
  Rational eps(1, 16);
  for (;;) {
    RatInterval iv = sym_eval(x, eps);
    Int a = floor_rat(iv.lo), b = floor_rat(iv.hi);
    if (a == b) return a;
    if (iv.width() < min_width)
      throw PrecisionExhausted("value within " + std::to_string(to_double(min_width)) +
                               " of integer " + b.str() + ", floor undecidable: " + x.describe());
    eps /= 1024;
  }
}

SymReal sym_frac(const SymReal& x, const Rational& min_width) {
  Int n = sym_floor(x, min_width);
  return SymReal(x.registry(), x.rational_part() - Rational(n), x.coeffs());
}

int sym_compare(const SymReal& a, const SymReal& b, const Rational& budget_width) {
  if (identical(a, b)) return 0;
  SymReal d = a - b;
  if (d.is_rational()) {
    const Rational& r = d.rational_part();
    return r > 0 ? 1 : (r < 0 ? -1 : 0);
  }
  if (std::fabs(d.approx()) > d.approx_err()) return d.approx() > 0 ? 1 : -1;
  Rational eps(1, 16);
  for (;;) {
    RatInterval iv = sym_eval(d, eps);
    if (iv.lo > 0) return 1;
    if (iv.hi < 0) return -1;
    if (iv.width() < budget_width)
      throw RefinementBudgetExceeded("comparison undecided at budget width: " + d.describe());
    eps /= 1024;
  }
}

namespace {

// One vector from the rational nullspace of the column family, or empty if
// the columns are linearly independent. cols[i][row over gens].
std::vector<Rational> nullspace_vector(std::vector<std::vector<Rational>> m, std::size_t k) {
  std::size_t rows = m.size();
  std::vector<std::size_t> pivot_col;  // per pivot row
  std::vector<bool> col_is_pivot(k, false);
  std::size_t r = 0;
  for (std::size_t c = 0; c < k && r < rows; ++c) {
    std::size_t sel = r;
    while (sel < rows && m[sel][c] == 0) ++sel;
    if (sel == rows) continue;
    std::swap(m[sel], m[r]);
    Rational inv = m[r][c];
    for (std::size_t j = c; j < k; ++j) m[r][j] /= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < k; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col.push_back(c);
    col_is_pivot[c] = true;
    ++r;
  }
  std::size_t free_col = k;
  for (std::size_t c = 0; c < k; ++c)
    if (!col_is_pivot[c]) {
      free_col = c;
      break;
    }
  if (free_col == k) return {};
  std::vector<Rational> v(k, Rational(0));
  v[free_col] = 1;
  for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -m[i][free_col];
  return v;
}

}  // namespace

Independence rational_independence(const std::vector<SymReal>& xs) {
  const BasisRegistry* reg = nullptr;
  for (const auto& x : xs) {
    if (x.registry()) {
      if (reg && reg != x.registry()) throw Error("mixed registries in independence query");
      reg = x.registry();
    }
  }
  std::size_t k = xs.size();
  Independence out;
  if (k == 0) return out;

  std::vector<std::uint32_t> gen_rows;
  for (const auto& x : xs)
    for (const auto& [i, c] : x.coeffs()) gen_rows.push_back(i);
  std::sort(gen_rows.begin(), gen_rows.end());
  gen_rows.erase(std::unique(gen_rows.begin(), gen_rows.end()), gen_rows.end());

  std::vector<std::vector<Rational>> m(gen_rows.size(), std::vector<Rational>(k, Rational(0)));
  for (std::size_t col = 0; col < k; ++col)
    for (const auto& [i, c] : xs[col].coeffs()) {
      std::size_t row = std::lower_bound(gen_rows.begin(), gen_rows.end(), i) - gen_rows.begin();
      m[row][col] = c;
    }

  std::vector<Rational> v = nullspace_vector(std::move(m), k);
  if (v.empty()) return out;

  Rational n0 = 0;
  for (std::size_t i = 0; i < k; ++i) n0 -= v[i] * xs[i].rational_part();

  std::vector<Rational> w;
  w.push_back(n0);
  for (auto& vi : v) w.push_back(vi);

  Int l = 1;
  for (const auto& q : w) l = boost::multiprecision::lcm(l, denominator(q));
  std::vector<Int> wi;
  Int g = 0;
  for (const auto& q : w) {
    Int z = numerator(q) * (l / denominator(q));
    wi.push_back(z);
    g = boost::multiprecision::gcd(g, z < 0 ? Int(-z) : z);
  }
  if (g > 1)
    for (auto& z : wi) z /= g;
  for (const auto& z : wi) {
    if (z == 0) continue;
    if (z < 0)
      for (auto& y : wi) y = -y;
    break;
  }
  out.independent = false;
  out.witness = std::move(wi);
  return out;
}

}  // namespace minprod
