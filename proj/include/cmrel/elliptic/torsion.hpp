#pragma once

#include <vector>

#include "cmrel/elliptic/curve.hpp"

namespace cmrel {

struct TorsionGroup {
  std::vector<long> invariants;  // {} trivial, {n} cyclic, {2, 2m}
  std::vector<Point> generators;
  std::vector<Point> points;     // all torsion points, O first
  long order() const { return static_cast<long>(points.size()); }
};

/// Exact rational torsion by a Nagell-Lutz search on the integral short model
/// Y^2 = X^3 - 27 c4 X - 54 c6, each candidate confirmed by its order.
TorsionGroup torsion_subgroup(const CurveQ& E);

/// Order of a rational point, or 0 if it has infinite order (Mazur: torsion
/// orders are at most 12).
long point_order(const CurveQ& E, const Point& P);

}  // namespace cmrel
