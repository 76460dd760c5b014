#pragma once

#include <memory>
#include <optional>
#include <string>

#include "minprod/spaces.hpp"

namespace minprod {

// An exact reason a system cannot be minimal. defect(start, x) evaluates, on
// embedded coordinates, a continuous function that is exactly zero on the
// orbit closure of start; uncovered net balls with a large defect make honest
// scan-failure witnesses.
struct ObstructionWitness {
  enum class Kind { FiniteOrder, TorusCharacter, S3Axis, ZeroCocycle };
  Kind kind = Kind::FiniteOrder;
  json detail;
  std::function<double(const double* start, const double* x)> defect;
};

std::string to_string(ObstructionWitness::Kind k);

struct SystemDescriptor {
  SpaceDescriptor space;
  std::string name;
  json params;

  std::function<SpacePoint(const SpacePoint&)> step;
  std::function<SpacePoint(const SpacePoint&)> inverse;  // null when absent
  std::function<void(double*)> step_num;                 // in place on embedded coords
  std::function<void(double*)> inverse_num;              // null when absent

  std::optional<Int> exact_period;  // exact period of every point, when known
  std::optional<ObstructionWitness> obstruction;
  std::vector<SymReal> rotation_vector;  // nonempty for group rotations

  struct SkewInfo {
    std::size_t base_dim = 0;
    std::size_t fiber_dim = 0;
  };
  std::optional<SkewInfo> skew_info;               // set by skew_product
  std::shared_ptr<const SystemDescriptor> skew_base;
};

struct FactorMap {
  std::shared_ptr<const SystemDescriptor> source, target;
  std::function<SpacePoint(const SpacePoint&)> project;
  std::function<std::vector<SpacePoint>(const SpacePoint&, double)> fiber_probe;
};

struct DenjoySystem {
  SystemDescriptor system;
  FactorMap factor;
  std::shared_ptr<const DenjoyModel> model;
};

// Shared facts for rotation-like systems: exact period when every coordinate
// is rational, and a character obstruction when (1, alphas) has an exact
// integer relation.
struct RotationFacts {
  std::optional<Int> period;
  std::optional<ObstructionWitness> obstruction;
};
RotationFacts rotation_facts(const std::vector<SymReal>& alphas);

SystemDescriptor circle_rotation(SymReal alpha);
SystemDescriptor torus_rotation(std::vector<SymReal> alphas);
SystemDescriptor odometer(std::uint32_t base, std::size_t depth);
SystemDescriptor suspension_time_t(const SystemDescriptor& h, SymReal t);
DenjoySystem denjoy_system(SymReal alpha, Rational gap_scale, long window);
SystemDescriptor s3_translation(double gw, double gx, double gy, double gz);
SystemDescriptor two_circles_skew(SymReal alpha, SymReal beta);
// The swap-with-return-rotation map on {0,1} x Circle: (0,z) -> (1,z), (1,z) -> (0,z+alpha).
SystemDescriptor two_circles_base(SymReal alpha);
SystemDescriptor cyclic_system(long k);
SystemDescriptor identity_system(SpaceDescriptor space);
// Numeric-only torus translation (used for flow time-t maps); has no symbolic step.
SystemDescriptor torus_translation_numeric(std::size_t n, std::vector<double> shift);

}  // namespace minprod
