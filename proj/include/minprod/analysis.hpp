#pragma once

#include <functional>
#include <vector>

#include "minprod/cocycles.hpp"
#include "minprod/report.hpp"
#include "minprod/systems.hpp"

namespace minprod {

struct ScanOptions {
  double eps = 0.02;
  long horizon = 1000000;
  std::size_t samples = 16;
  std::uint64_t seed = 2026;
  long period_cap = 100000;  // exact orbit enumeration bound for known periods
  double defect_tol = 1e-6;  // obstruction validation along the worst orbit
  long stall = 0;            // steps without new coverage before giving up; 0 = auto
};

// Bounded-horizon eps-density scan. pass iff every sampled orbit covers the
// whole net. fail is reserved for exact obstructions: a finite exact period,
// or an invariant-defect witness validated along the orbit; a bare coverage
// shortfall reports inconclusive with the uncovered ball. Deterministic
// given the seed.
struct DensityReport {
  double epsilon = 0.0;
  long horizon = 0;
  std::size_t samples = 0;
  double worst_cover_fraction = 0.0;
  json witness;  // null when covered; else uncovered ball center plus defect data
  Verdict verdict = Verdict::inconclusive;
  json evidence = json::object();
  Report to_report() const;
};

DensityReport minimality_scan(const SystemDescriptor& s, const ScanOptions& opts = {});

// Exact verdict for the product of two torus rotations via integer relations
// on (1, x, g). Throws FactorNotMinimal when a factor fails its own
// certificate; a nonminimal product carries the relation as the character
// pair witness.
struct ProductCertificate {
  Verdict verdict = Verdict::minimal;
  std::vector<Int> witness;  // w0 + sum_i wi ci = 0 over concatenated (x, g)
  json to_json() const;
};
ProductCertificate torus_product_certificate(const std::vector<SymReal>& x,
                                             const std::vector<SymReal>& g);

// Weyl sums |1/n sum_{m<=n} e(k * idx(m) * alpha)| for characters k = 1..max_char;
// idx defaults to the identity sequence when null. pass iff every ratio is at
// or below tol.
Report weyl_test(const SymReal& alpha, const std::function<long(long)>& idx, long max_char,
                 long n, double tol = 1e-2);

struct HittingSet {
  Ball from, to;
  std::vector<long> times;  // hit times in [1, horizon], ascending
  long max_gap = 0;         // largest gap between consecutive times (leading gap included)
  long tail_gap = 0;        // horizon minus the last hit; truncation kept separate
  json to_json() const;
};

struct TransitivityReport {
  double eps = 0.0;
  long horizon = 0;
  std::vector<HittingSet> pairs;  // ordered net-ball pairs, row major by source
  Verdict verdict = Verdict::inconclusive;
  Report to_report() const;
};

// Hitting times between every ordered pair of net balls, sampled along the
// orbit of each source ball's center. pass iff every pair records a hit.
TransitivityReport transitivity_scan(const SystemDescriptor& s, double eps, long horizon);

// Scans t in [0, t_max] at step dt; records the times whose time-t map sends
// the source ball's center into the target ball, and the largest gap between
// recorded times (t_max when there are none).
Report syndetic_gaps(const std::function<SystemDescriptor(double)>& flow, const Ball& from,
                     const Ball& to, double t_max, double dt);

// c(s, s') = b*s - a*s' mod 1 is invariant under the affine torus map
// (s, s') -> (s + a*t0, s' + b*t0), exactly; affine_map() returns the map so
// density scans can run against the certificate.
struct InvariantWitness {
  long a = 0, b = 0;
  SymReal t0;
  SymReal value(const SpacePoint& p) const;
  SystemDescriptor affine_map() const;
  Report certify(long orbit_steps = 1000, std::size_t points = 1000,
                 std::uint64_t seed = 2026) const;
};
InvariantWitness invariant_function_witness(long a, long b, SymReal t0);

struct RecurrenceLevel {
  double radius = 0.0;
  Int period = 0;      // 0 when no return was found within the bound
  long verified = 0;   // multiples k*period that stayed within the radius
  long attempted = 0;
  double max_drift = 0.0;  // worst distance among the attempted returns
  bool exact = false;      // digit-exact returns (truncated-word path)
  json to_json() const;
};

// Shrinking-radius recurrence: for each level, the first return time into the
// ball around x and how many of its multiples stay inside. Word spaces get
// the exact digit path (period base^m at level m); everything else walks the
// numeric orbit.
std::vector<RecurrenceLevel> periodic_recurrence_check(const SystemDescriptor& s,
                                                       const SpacePoint& x, long depth,
                                                       long verify_count = 8,
                                                       long period_bound = 1000000);

// Density scan started from every fiber-net point over one base point; the
// system must have been built by skew_product. pass iff every such orbit
// covers the eps-net of the whole skew space within the horizon.
Report fiber_transitivity_check(const SystemDescriptor& skew, const SpacePoint& base_point,
                                double eps, long horizon);

}  // namespace minprod
