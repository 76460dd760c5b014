#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "minprod/report.hpp"
#include "minprod/systems.hpp"

namespace minprod {

// Sampled transfer function on a dyadic circle grid with linear interpolation.
// Plateaus evaluate bit-exactly (equal neighbor nodes short-circuit), which is
// what the perturbation machinery relies on for exact landings.
struct TransferTable {
  std::size_t bits = 18;
  std::size_t dim = 1;
  std::vector<double> vals;  // node-major: vals[node * dim + c]

  std::size_t nodes() const { return std::size_t(1) << bits; }
  double mesh() const { return 1.0 / static_cast<double>(nodes()); }
  void eval(double x, double* out) const;
  json to_json() const;
  static TransferTable from_json(const json& j);
};

// Torus-valued cocycle over a base system. eval_num acts on the base space's
// embedded coordinates; eval_sym is present only for closed forms.
struct Cocycle {
  std::size_t dim = 1;
  std::function<void(const double*, double*)> eval_num;
  std::function<std::vector<SymReal>(const SpacePoint&)> eval_sym;
  json description = json::object();
  double lipschitz = 0.0;
  bool is_zero = false;
  std::optional<std::vector<SymReal>> const_value;
  std::shared_ptr<const TransferTable> table;
};

Cocycle zero_cocycle(std::size_t dim = 1);
Cocycle const_cocycle(std::vector<SymReal> c);
Cocycle linear_cocycle(long m);      // circle base: gamma -> m*gamma mod 1
Cocycle sine_cocycle(double kappa);  // gamma -> 1/2 + kappa*sin(2 pi gamma)
Cocycle anzai_cocycle();             // gamma -> gamma
Cocycle table_cocycle(std::shared_ptr<const TransferTable> t, json description);

// f^(n)(y) = sum_{i<n} f(S^i y) mod 1. The first form is exact and throws
// Error when f or S has no symbolic path; the second works on doubles.
std::vector<SymReal> iterate_cocycle(const Cocycle& f, const SystemDescriptor& S,
                                     const SpacePoint& y, long n);
void iterate_cocycle_num(const Cocycle& f, const SystemDescriptor& S, const double* y, long n,
                         double* out);

// f(y) = xi(S y) - xi(y); iterates telescope to xi(S^n y) - xi(y).
Cocycle coboundary(const Cocycle& xi, const SystemDescriptor& S);

// Max over a dyadic grid of |f(gamma + 1/2) + f(gamma)| mod 1; pass iff the
// defect stays at or below tol. Requires fiber dimension 1.
Report invariant_check(const Cocycle& f, std::size_t grid = std::size_t(1) << 14,
                       double tol = 1e-9);

struct PerturbOptions {
  long horizon = 200000;       // search range for the orbit return time
  std::vector<double> avoid;   // circle positions new bump supports must miss
  bool symmetrize = false;     // keep the half-turn antisymmetry exactly
  std::size_t grid_bits = 18;  // construction grid for the increment table
};

struct Perturbation {
  Cocycle theta;          // transfer-function increment, table-backed
  long n = 0;             // accepted return time
  long N = 0;             // averaging length
  double radius = 0.0;    // bump support radius
  std::vector<double> g;  // group displacement, lifted to (-1/2, 1/2]
  json checks;            // post-hoc grid verification evidence
};

// Builds the increment theta = eta o rho: rho averages N pullbacks of a
// flat-top bump field that is 0 on the orbit segments at 0..N-1 and k..k+N-1
// and 1 on the segment at k+n..k+n+N-1, and eta is the straight line to g.
// Guarantees, verified on the construction grid: the base orbit of start is
// in base_window at k and k+n; the perturbed iterated cocycle over n steps
// at S^k(start) equals the group_window center; sup |coboundary(theta)| < eps.
Perturbation perturb_cocycle(const Cocycle& xi, double eps, const SystemDescriptor& base,
                             const SpacePoint& start, const Ball& base_window,
                             const Ball& group_window, long k, const PerturbOptions& opts = {});

// Transitivity demand: the skew orbit out of `from` must enter `to`. Balls
// live in the skew space's embedded coordinates (base coordinate first).
struct TransitivePair {
  Ball from;
  Ball to;
};

struct BuildResult {
  Cocycle f;         // coboundary of the final transfer function
  Cocycle transfer;  // the transfer function itself
  bool complete = false;
  json coverage = json::array();  // one entry per pair: status, time, margin
  long perturbations = 0;
};

struct BuildOptions {
  std::size_t grid_bits = 18;
  long check_horizon = 30000;
  long return_horizon = 200000;
  bool symmetrize = false;
};

// Greedy composition of perturbations, one per uncovered pair, with committed
// hits kept exact by keeping later bump supports away from the evaluation
// points of earlier ones. Runs until covered, stalled, or out of budget;
// partial results carry the uncovered pairs in `coverage`.
BuildResult build_transitive_cocycle(const SystemDescriptor& base,
                                     const std::vector<TransitivePair>& pairs,
                                     const std::vector<double>& eps_schedule, long budget,
                                     const BuildOptions& opts = {});

}  // namespace minprod
