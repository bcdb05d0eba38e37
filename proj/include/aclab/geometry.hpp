#pragma once

#include "aclab/lattice.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace aclab {

using Tri = std::array<IVec2, 3>;

// Nonnegative rational p/q with q > 0.
struct Rational {
  std::int64_t p = 0, q = 1;
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};
bool operator<(const Rational& a, const Rational& b);

// Intersection of the segment a + t r, t in [0,1], with a closed lattice
// triangle, in exact integer arithmetic.
struct SegmentClip {
  bool hit = false;     // the closed sets intersect (possibly in a point)
  Rational t0, t1;      // parameter interval when hit
  int edge = -1;        // local edge (opposite vertex index) if the overlap lies on it
  double length() const { return hit ? t1.value() - t0.value() : 0.0; }
  bool positive() const { return hit && t0 < t1; }
};

SegmentClip clip_segment(const Tri& T, const IVec2& a, const IVec2& r);

enum class ChiVariant { plain, interface };

// Average of chi_T over the unit-parametrized segment a -> a + r (integer
// coordinates; scale invariant).  Interior parts weigh 1, parts inside an
// edge of T weigh 1/2; with ChiVariant::interface an edge portion weighs 1
// when boundary_edge says that edge lies on the interface boundary.
double bond_chi_integral(const Tri& T, const IVec2& a, const IVec2& r, ChiVariant variant = ChiVariant::plain,
                         const std::array<bool, 3>& boundary_edge = {false, false, false});

// eps^2 sum_{x in eps Z^2} avg_x^{x+eps r} chi_T db - |T|, in lattice units
// (both sides scale by eps^2), returned relative to |T|.
double verify_bond_density(const Tri& T, const IVec2& r);

long long twice_area(const Tri& T);

// Convex polygon utilities (double precision), used for areas of overlap.
using Polygon = std::vector<Vec2>;
Polygon convex_hull(std::vector<Vec2> pts);
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
double polygon_area(const Polygon& P);

}  // namespace aclab
