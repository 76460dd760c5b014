#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minprod/rational.hpp"

namespace minprod {

// Named irrational generators with rational enclosure oracles. Generators
// registered together are treated as rationally independent of each other and
// of 1; every exact certificate downstream is conditional on that axiom.
// Append-only: indices stay stable for the registry's lifetime.
class BasisRegistry {
 public:
  using Oracle = std::function<RatInterval(const Rational& eps)>;

  BasisRegistry() = default;
  explicit BasisRegistry(const std::vector<std::string>& catalog_names);
  BasisRegistry(const BasisRegistry&) = delete;
  BasisRegistry& operator=(const BasisRegistry&) = delete;

  // Returns the index of the new generator.
  std::size_t add(std::string name, Oracle oracle);
  std::size_t add_named(const std::string& catalog_name);

  std::size_t size() const { return gens_.size(); }
  const std::string& name(std::size_t i) const { return gens_.at(i).name; }
  std::optional<std::size_t> find(const std::string& name) const;

  // Enclosure of generator i with width <= eps. Successive results are
  // nested: the cached best interval only ever shrinks.
  RatInterval enclosure(std::size_t i, const Rational& eps) const;

  // Double midpoint and a rigorous bound on |value - approx|.
  double approx(std::size_t i) const { return gens_.at(i).mid; }
  double approx_err(std::size_t i) const { return gens_.at(i).err; }

  // Built-in catalog: sqrt2, sqrt3, sqrt5, golden, pi.
  static Oracle catalog_oracle(const std::string& name);

 private:
  struct Gen {
    std::string name;
    Oracle oracle;
    RatInterval best;
    double mid = 0.0;
    double err = 0.0;
  };
  std::deque<Gen> gens_;
  mutable std::mutex mu_;
};

// Exact element of the rational vector space spanned by 1 and the registry
// generators: rational_part + sum coeff_i * gen_i. Immutable value type;
// freely shareable across threads. Coefficients are kept sorted by generator
// index with zero entries dropped, so coefficient-vector identity is the
// exactness test.
class SymReal {
 public:
  using Coeffs = std::vector<std::pair<std::uint32_t, Rational>>;

  SymReal() : SymReal(Rational(0)) {}
  SymReal(int r) : SymReal(Rational(r)) {}
  explicit SymReal(Rational r);
  SymReal(const BasisRegistry* reg, Rational r, Coeffs coeffs);

  static SymReal generator(const BasisRegistry& reg, std::size_t index,
                           const Rational& coeff = Rational(1));

  const Rational& rational_part() const { return rat_; }
  const Coeffs& coeffs() const { return coeffs_; }
  const BasisRegistry* registry() const { return reg_; }
  bool is_rational() const { return coeffs_.empty(); }
  bool is_zero() const { return coeffs_.empty() && rat_ == 0; }
  Rational coeff_of(std::uint32_t gen_index) const;

  SymReal operator+(const SymReal& o) const;
  SymReal operator-(const SymReal& o) const;
  SymReal operator-() const;
  SymReal scaled(const Rational& c) const;

  // Cached double midpoint and rigorous error bound, computed at
  // construction. Numeric paths use these; exact paths never do.
  double approx() const { return approx_; }
  double approx_err() const { return err_; }

  std::string describe() const;

  friend bool identical(const SymReal& a, const SymReal& b) {
    return a.rat_ == b.rat_ && a.coeffs_ == b.coeffs_;
  }

 private:
  const BasisRegistry* reg_ = nullptr;
  Rational rat_;
  Coeffs coeffs_;
  double approx_ = 0.0;
  double err_ = 0.0;

  void normalize();
  void compute_approx();
  static const BasisRegistry* merge_registries(const SymReal& a, const SymReal& b);
};

inline const Rational& default_budget_width() {
  static const Rational w = pow10(30);  // 10^-30
  return w;
}

// Interval of width <= eps containing the exact value.
RatInterval sym_eval(const SymReal& x, const Rational& eps);

// Exact floor. Throws PrecisionExhausted if x is provably within min_width of
// an integer but the side cannot be decided.
Int sym_floor(const SymReal& x, const Rational& min_width = default_budget_width());

// x - floor(x), exactly, in [0, 1).
SymReal sym_frac(const SymReal& x, const Rational& min_width = default_budget_width());

// -1, 0, +1. Equality holds iff the coefficient vectors are identical; for
// distinct vectors the difference is refined until zero is excluded. Throws
// RefinementBudgetExceeded when the budget width is reached first.
int sym_compare(const SymReal& a, const SymReal& b,
                const Rational& budget_width = default_budget_width());

struct Independence {
  bool independent = true;
  // When dependent: content-reduced integers (w0, w1, ..., wk), first nonzero
  // positive, with w0*1 + sum wi*xs[i-1] = 0 exactly.
  std::vector<Int> witness;
};

// Decides rational independence of (1, xs...) by exact linear algebra on the
// generator-coefficient matrix.
Independence rational_independence(const std::vector<SymReal>& xs);

}  // namespace minprod
