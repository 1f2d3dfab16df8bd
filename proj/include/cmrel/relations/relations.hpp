#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmrel/elliptic/analytic.hpp"
#include "cmrel/elliptic/curve.hpp"
#include "cmrel/elliptic/endomorphism.hpp"
#include "cmrel/numerics/intmat.hpp"
#include "cmrel/numerics/real.hpp"

namespace cmrel {

struct MasserInput {
  long n = 1;
  long omega = 1;  // number of torsion points
  double q = 1;    // upper bound for the heights
  double eta = 1;  // lower bound for nonzero heights
  bool cm = false;
};

/// n^{n-1} omega (q/eta)^{(n-1)/2}, or (2n)^{2n-1} omega (q/eta)^{(2n-1)/2}
/// with CM. Throws InvalidInput when q < eta or a field is out of range.
Real masser_bound(const MasserInput& mi, Prec prec = 128);
mpz_class masser_coefficient_bound(const MasserInput& mi);

/// A point given either exactly or by a complex approximation (points over
/// number fields). Approximate points are certified numerically only.
struct RelPoint {
  std::optional<Point> exact;
  ComplexPoint approx;
  std::optional<PrecComplex> log;  // elliptic logarithm w.r.t. periods(E, prec), if known
  static RelPoint rational(const Point& P) {
    RelPoint r;
    r.exact = P;
    return r;
  }
  static RelPoint numeric(const ComplexPoint& P) {
    RelPoint r;
    r.approx = P;
    return r;
  }
};

enum class Completeness { MasserBound, UpToCap };

/// The torsion point with parameter (a w1 + b w2) / t, where t is the
/// exponent of E(Q)_tors.
struct TorsionTag {
  long a = 0, b = 0, t = 1;
  long order() const;
  std::optional<Point> point;  // when it is a rational point
};

/// Relations sum m_i x_i = T with T a torsion point of order dividing the
/// exponent of E(Q)_tors. Without CM row entries are
/// m_1..m_n; with CM they are a_1, b_1, ..., a_n, b_n for m_i = a_i + b_i rho.
struct RelationLattice {
  long n = 0;
  EndRing end;
  IntMatrix basis;              // Hermite form
  std::vector<TorsionTag> torsion;  // sum m_i x_i for each basis row
  std::vector<bool> exact;      // row checked by exact group law
  mpz_class coeff_bound;
  Completeness completeness = Completeness::MasserBound;
  Prec prec = 0;

  long width() const { return end.cm ? 2 * n : n; }
  /// Rank over End(E).
  long rank() const;
  /// Sublattice of relations with sum m_i x_i = O, in Hermite form.
  IntMatrix exact_relations(const CurveQ& E) const;
  std::string completeness_label() const;
};

struct RelationOptions {
  Prec prec = 128;
  Prec max_prec = 2048;
  long eta_search = 400;  // naive-height bound for empirical_eta
  long cap = 10000;       // coefficient bound when no height floor is known
  long max_cap = 1000000000;
};

/// Basis of all relations among the points up to torsion, each verified
/// before inclusion. Throws InsufficientPrecision ("insufficient precision")
/// when max_prec is reached and Indeterminate("unbounded search") when no
/// usable coefficient bound exists.
RelationLattice relation_lattice(const CurveQ& E, const std::vector<RelPoint>& points,
                                 const RelationOptions& opt = {});
RelationLattice relation_lattice(const CurveQ& E, const std::vector<Point>& points,
                                 const RelationOptions& opt = {});

/// Exact check of sum m_i x_i == target by the group law.
bool verify_relation_exact(const CurveQ& E, const std::vector<Point>& points, const IntVec& coeffs,
                           const Point& target);

/// Check with End(E) coefficients (width 2n when end.cm) or approximate
/// points: the elliptic logarithms are compared at prec bits. Returns false
/// when the residual is clearly nonzero and throws Indeterminate when the
/// precision cannot decide.
bool verify_relation(const CurveQ& E, const EndRing& end, const std::vector<RelPoint>& points,
                     const IntVec& coeffs, const Point& target, Prec prec);

struct CosetDesc {
  long n = 0;
  IntMatrix lattice;  // relations defining B_0
  long t = 1;         // order of the torsion translate
  long dim = 0;
  bool proper() const { return dim < n || t > 1; }
};

CosetDesc smallest_torsion_coset(const RelationLattice& rl);

/// Complex multiplication by rho on a parameter z.
PrecComplex rho_times(const EndRing& end, const Lattice2& L, const PrecComplex& z);

}  // namespace cmrel
