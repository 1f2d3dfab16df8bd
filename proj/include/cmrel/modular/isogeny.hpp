#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmrel/modular/modpoly.hpp"

namespace cmrel {

/// Whether (j(s1), j(s2)) lies on X_N, i.e. Phi_N(j(s1), j(s2)) = 0. Decided
/// exactly for CM points: the roots of Phi_N(j(s1), Y) are the j(g s1) for
/// the cyclic isogeny matrices g, and equality of j-values is equality of
/// reduced forms.
bool in_XN(const TauPoint& s1, const TauPoint& s2, long N);

/// Numeric test of Phi_N(j1, j2) = 0 for N <= 20, against the scale
/// S = sum |c_ab| max(1,|j1|)^a max(1,|j2|)^b. True when |value| < 2^{-prec/4} S,
/// false when the ball excludes zero by that margin; otherwise throws Indeterminate.
bool in_XN_numeric(const PrecComplex& j1, const PrecComplex& j2, long N, Prec prec);

/// Roots of Phi_N(j0, Y) with multiplicity.
std::vector<PrecComplex> hecke_neighbors(const PrecComplex& j0, long N, Prec prec);

/// Phi_N(j0, Y) for an integral j0: its roots, with multiplicity, are the
/// neighbours as algebraic numbers.
IntPoly hecke_neighbor_poly(const mpz_class& j0, long N);

/// The CM points g(s) for the cyclic isogeny matrices g, reduced; their
/// j-values are the roots of Phi_N(j(s), Y).
std::vector<TauPoint> hecke_neighbor_points(const TauPoint& s, long N);

/// Reduced representative of s under SL2(Z).
TauPoint reduced_point(const TauPoint& s);

/// Multiplicative Weil height of tau: the square root of the Mahler measure
/// of a X^2 + b X + c, which is max(a, c).
Real height_of_quadratic_point(const TauPoint& t, Prec prec = 64);
long height_squared_of_quadratic_point(const TauPoint& t);

struct DIndependence {
  bool independent = true;
  std::string witness;        // empty when independent
  std::optional<size_t> index;  // point with |disc| <= D
  std::optional<std::pair<size_t, size_t>> pair;
  long level = 0;  // N of the pair relation
};

/// All |disc(s_i)| > D and no pair on X_N for N <= D.
DIndependence is_D_independent(const std::vector<TauPoint>& points, long D);

}  // namespace cmrel
