#pragma once

#include <optional>

#include "cmrel/elliptic/curve.hpp"
#include "cmrel/numerics/real.hpp"

namespace cmrel {

struct HeightValue {
  Real value;
  Mag err;
  double to_double() const { return value.to_double(); }
};

/// Logarithmic naive height log max(|num|, |den|) of a rational.
Real naive_height(const mpq_class& x, Prec prec = 64);

/// Neron-Tate height, normalized as lim h(x(2^k P)) / 4^k, from the archimedean
/// Neron function on the minimal model plus the local terms at bad primes and at
/// primes in the denominator of x. Torsion points return 0 with a positive err.
HeightValue canonical_height(const CurveQ& E, const Point& P, Prec prec = 128);

/// h(x(2^k P)) / 4^k computed exactly; a slow independent estimate.
double canonical_height_doubling(const CurveQ& E, const Point& P, int k);

/// Smallest canonical height of a non-torsion point with x = n / d^2,
/// |n| <= bound and d^2 <= bound; nullopt if the search finds only torsion.
std::optional<HeightValue> empirical_eta(const CurveQ& E, long bound, Prec prec = 128);

/// Rational points with naive height of x at most bound (both signs of y).
std::vector<Point> search_points(const CurveQ& E, long bound);

}  // namespace cmrel
