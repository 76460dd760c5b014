#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "minprod/symreal.hpp"

namespace minprod {

using json = nlohmann::json;

enum class SpaceKind { Circle, Torus, Cantor, Solenoid, Denjoy, Finite, Quaternion, Product, Klein };

std::string to_string(SpaceKind k);

enum class Side : int { minus = -1, none = 0, plus = 1 };

struct SpacePoint;

struct CirclePt {
  SymReal s;  // in [0,1)
};

struct TorusPt {
  std::vector<SymReal> c;  // each in [0,1)
};

struct CantorPt {
  std::vector<std::uint8_t> w;  // least significant digit first
  std::uint32_t base = 2;
};

struct SolenoidPt {
  CantorPt y;
  SymReal s;  // height in [0,1)
};

// Data shared by the doubled-orbit circle model: the rotation, the tracked
// window of marked points and their gap lengths, and the order embedding.
struct DenjoyModel {
  const BasisRegistry* reg = nullptr;
  SymReal alpha;  // in (0,1), irrational
  Rational c;     // gap scale in (0,1)
  long W = 0;     // marked indices are |n| <= W

  double alpha_d = 0.0;
  double L = 0.0;                  // total gap mass, < 1
  std::vector<double> xs_sorted;   // marked positions, ascending
  std::vector<long> idx_sorted;    // orbit index of each sorted slot
  std::vector<double> gap_sorted;  // gap length of each sorted slot
  std::vector<double> gap_prefix;  // prefix sums of gap_sorted

  Rational gap_len(long n) const;            // c(1-c)2^{-|n|}
  SymReal marked_point(long n) const;        // frac(n*alpha); WindowOverflow if |n| > W
  std::optional<long> marked_index(const SymReal& pos) const;
  double embed_e(double pos, int side, long idx) const;
};

struct DenjoyPt {
  SymReal pos;
  Side side = Side::none;
  long idx = 0;  // orbit index, meaningful iff side != none
};

struct FinitePt {
  long i = 0;
  long n = 1;  // cardinality
};

struct QuatPt {
  std::array<double, 4> q{1, 0, 0, 0};  // unit within 1e-12, renormalized
};

struct ProductPt {
  std::shared_ptr<const SpacePoint> a, b;
};

struct KleinPt {
  SymReal g;  // in [0, 1/2)
  SymReal z;  // in [0, 1)
};

struct SpacePoint {
  std::variant<CirclePt, TorusPt, CantorPt, SolenoidPt, DenjoyPt, FinitePt, QuatPt, ProductPt,
               KleinPt>
      v;

  SpaceKind kind() const;
  template <class T>
  const T& as() const {
    const T* p = std::get_if<T>(&v);
    if (!p) throw Error("space point has unexpected kind");
    return *p;
  }
};

// Exact equality of representations (used for orbit-closure detection).
bool exactly_equal(const SpacePoint& a, const SpacePoint& b);

json point_to_json(const SpacePoint& p);

// Open ball in embedded coordinates; the standard shape for windows and
// targets handed to analyses and constructors.
struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};

// eps-net with a reverse index: hit() appends the indices of all net balls
// whose center lies within eps of the embedded point.
struct NetIndexer {
  double eps = 0.0;
  std::size_t dim = 0;
  std::vector<SpacePoint> points;
  std::vector<double> coords;  // points.size() x dim, row major
  std::function<void(const double*, std::vector<std::size_t>&)> hit;

  std::size_t size() const { return points.size(); }
  const double* center(std::size_t i) const { return coords.data() + i * dim; }
};

struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::Circle;
  std::size_t dim = 1;  // numeric embedding dimension
  json params;

  std::function<double(const double*, const double*)> metric_num;
  std::function<std::vector<double>(const SpacePoint&)> embed;
  std::function<NetIndexer(double eps)> make_net;
  std::function<std::vector<SpacePoint>(std::size_t count, std::uint64_t seed)> sampler;

  double metric(const SpacePoint& p, const SpacePoint& q) const;
  std::vector<SpacePoint> net(double eps) const { return make_net(eps).points; }
};

// Point constructors normalize coordinates (frac for circle values, canonical
// representative for the Klein bottle) and validate invariants.
SpacePoint circle_point(SymReal s);
SpacePoint torus_point(std::vector<SymReal> coords);
SpacePoint cantor_point(std::vector<std::uint8_t> word, std::uint32_t base);
SpacePoint solenoid_point(CantorPt y, SymReal height);
SpacePoint denjoy_point(const std::shared_ptr<const DenjoyModel>& m, SymReal pos, Side side);
SpacePoint finite_point(long i, long n);
SpacePoint quat_point(double w, double x, double y, double z);
SpacePoint product_point(SpacePoint a, SpacePoint b);
SpacePoint klein_point(SymReal g, SymReal z);  // canonicalizes

SpaceDescriptor circle_space(const BasisRegistry* reg);
SpaceDescriptor torus_space(const BasisRegistry* reg, std::size_t n);
SpaceDescriptor cantor_space(std::uint32_t base, std::size_t depth);
// The gluing map h identifies (y,1) with (h(y),0); glue_num/unglue_num apply
// h and h^{-1} in place to a digit array of length depth.
SpaceDescriptor solenoid_space(std::uint32_t base, std::size_t depth,
                               std::function<void(double*)> glue_num,
                               std::function<void(double*)> unglue_num);
SpaceDescriptor denjoy_space(const std::shared_ptr<const DenjoyModel>& m);
SpaceDescriptor finite_space(long n);
SpaceDescriptor s3_space();
SpaceDescriptor product_space(const SpaceDescriptor& a, const SpaceDescriptor& b);
SpaceDescriptor klein_space(const BasisRegistry* reg);

}  // namespace minprod
