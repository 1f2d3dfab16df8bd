#pragma once

#include <utility>

#include "cmrel/elliptic/curve.hpp"
#include "cmrel/numerics/qseries.hpp"

namespace cmrel {

/// Period lattice Z w1 + Z w2 with Im(w2 / w1) > 0. For curves over the
/// rationals w1 is the least positive real period.
struct Lattice2 {
  PrecComplex w1, w2;

  PrecComplex tau() const { return w2 / w1; }
  /// Least real period times the number of real components.
  PrecComplex real_volume(const CurveQ& E) const;
  /// Coordinates (s, t) with z = s w1 + t w2.
  std::pair<Real, Real> coordinates(const PrecComplex& z) const;
  /// Representative s w1 + t w2 with s, t in [0, 1).
  PrecComplex reduce(const PrecComplex& z) const;
  /// Distance of the coordinates of z from the nearest integers.
  double lattice_distance(const PrecComplex& z) const;
};

/// Periods of the invariant differential dx / (2y + a1 x + a3) by the AGM.
Lattice2 periods(const CurveQ& E, Prec prec);

/// Normalized Eisenstein series E4 = 1 + 240 sum sigma_3(n) q^n and E6.
QSeries eisenstein_series(int k, int T);
/// c4 and c6 of the lattice: (2 pi / w1)^4 E4(tau), (2 pi / w1)^6 E6(tau).
std::pair<PrecComplex, PrecComplex> lattice_invariants(const Lattice2& L);

/// Weierstrass p and its derivative for the lattice, by q-series.
PrecComplex wp(const Lattice2& L, const PrecComplex& z);
PrecComplex wp_prime(const Lattice2& L, const PrecComplex& z);

struct ComplexPoint {
  bool inf = true;
  PrecComplex x, y;
};

/// The point of E(C) with parameter z: x = wp(z) - b2/12, 2y + a1 x + a3 = wp'(z).
ComplexPoint weierstrass_point(const CurveQ& E, const Lattice2& L, const PrecComplex& z);

/// z in the fundamental parallelogram with weierstrass_point(z) = P.
PrecComplex elliptic_log(const CurveQ& E, const Lattice2& L, const Point& P);
PrecComplex elliptic_log(const CurveQ& E, const Lattice2& L, const ComplexPoint& P);

/// Archimedean Neron function at z (z not in the lattice), normalized so that
/// lambda(z) - log|x| / 2 tends to -log|Delta| / 12 at the origin. Returns the
/// value and its error radius.
std::pair<Real, Mag> archimedean_local_height(const Lattice2& L, const PrecComplex& z);

}  // namespace cmrel
