#pragma once

#include "minprod/cocycles.hpp"
#include "minprod/systems.hpp"

namespace minprod {

// Product system on product_space(a.space, b.space) with the max metric.
// Steps act componentwise; symbolic paths exist iff both factors have them.
// Exact periods combine by lcm; a non-minimality obstruction of either
// factor lifts with its coordinate offset, and when both factors carry
// rotation vectors the product gets the combined rotation facts.
SystemDescriptor direct_product(const SystemDescriptor& a, const SystemDescriptor& b);

// Skew product over the base: step(y, z) = (base.step(y), z + f(y) mod 1)
// with z in the fiber torus of dimension fiber_dim (must equal f.dim).
// Circle and torus bases flatten to a single torus of combined dimension so
// quotient constructions accept the result; other bases pair with the fiber
// torus in a product space. skew_info and skew_base record the split.
SystemDescriptor skew_product(const SystemDescriptor& base, const Cocycle& f,
                              std::size_t fiber_dim);

// Quotient of a torus-2 system by the involution i(g, z) = (g + 1/2, -z).
// Precondition: the system commutes with i, checked exactly on a symbolic
// sample when the symbolic step exists and on a numeric grid always; throws
// EquivarianceViolation with a witness point otherwise.
SystemDescriptor klein_quotient(const SystemDescriptor& p);

struct FactorVerifyOptions {
  double net_eps = 0.1;            // target net used for fiber probes
  double probe_resolution = 1e-3;  // resolution handed to fiber_probe
  double defect_tol = 1e-9;        // semiconjugacy defect threshold
  double singleton_fraction = 0.9; // almost-1-1 evidence threshold
  std::uint64_t seed = 2026;
};

// Checks the semiconjugacy project o source.step = target.step o project
// along sampled orbits (exactly where both steps are symbolic) and probes
// fiber cardinalities over a target net. Verdict: fail when the defect
// exceeds the tolerance, inconclusive when some fiber probe comes back
// empty, pass otherwise. Evidence carries the defect, fiber histogram,
// singleton fraction, and the almost-1-1 flag.
Report verify_factor(const FactorMap& fm, std::size_t samples = 16, long horizon = 128,
                     const FactorVerifyOptions& opts = {});

// Identity factor map of a system onto itself.
FactorMap identity_factor_map(const SystemDescriptor& s);

// Factor map from direct_product(a, b) onto factor `which` (0 or 1); fiber
// probes enumerate a net of the complementary factor at the resolution.
FactorMap product_factor_map(const SystemDescriptor& a, const SystemDescriptor& b, int which);

// Pairwise disjoint closed round discs centered on a finite torus-2 orbit
// segment, radius r0 * 2^{-|n|} at center n * alpha mod 1 for |n| <= W.
struct DiscFamily {
  SpaceDescriptor space;             // the ambient torus
  std::vector<SpacePoint> centers;   // slot n + W holds center index n
  std::vector<Rational> radii;
  long W = 0;
  std::vector<double> center_coords;  // embedded centers, row major
  std::vector<double> radii_num;

  long slot(long n) const { return n + W; }
  const SpacePoint& center(long n) const { return centers.at(static_cast<std::size_t>(slot(n))); }
  const Rational& radius(long n) const { return radii.at(static_cast<std::size_t>(slot(n))); }

  // Exact membership: true iff p lies in no open disc (boundaries belong).
  bool member(const SpacePoint& p) const;
  // Numeric membership on embedded coordinates.
  bool member_num(const double* p) const;
  // min over discs of (distance to center - radius); <= 0 inside the union.
  double distance_to_union_num(const double* p) const;

  // Scans a uniform grid with grid_per_side points per coordinate: every
  // grid point that is a member must lie within the grid mesh of the disc
  // union. Pass/inconclusive with the worst point as evidence.
  Report density_evidence(std::size_t grid_per_side = 256) const;
};

// Requires the torus rotation by alpha2 to be certificate-minimal (throws
// FactorNotMinimal with the integer relation otherwise) and the discs to be
// pairwise disjoint on the window (throws DisjointnessViolation naming the
// offending pair; a smaller r0 is the standard remedy).
DiscFamily scurve_family(const std::vector<SymReal>& alpha2, const Rational& r0, long W);

}  // namespace minprod
