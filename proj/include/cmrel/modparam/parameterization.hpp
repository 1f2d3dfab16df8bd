#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "cmrel/elliptic/analytic.hpp"
#include "cmrel/elliptic/tate.hpp"
#include "cmrel/modparam/newform.hpp"
#include "cmrel/numerics/poly.hpp"
#include "cmrel/quadforms/quadforms.hpp"

namespace cmrel {

/// phi: X_0(N) -> E, tau -> lambda * sum a_n / n q^n mod Lambda_E, where
/// Lambda_E is the period lattice of the minimal model.
struct ParamMap {
  ParamMap(CurveQ c, MinimalModel m) : curve(std::move(c)), mm(std::move(m)) {}

  CurveQ curve;      // as given by the caller
  MinimalModel mm;
  long N = 0;
  Lattice2 lattice;  // of mm.curve
  mpq_class lambda;  // smallest positive rational with lambda Lambda_f in Lambda_E
  int fricke_sign = 0;  // f | W_N = fricke_sign * f
  PrecComplex phi_zero;  // unscaled integral from i oo to the cusp 0
  Prec prec = 0;
};

/// Builds the map: periods of the newform from elements of Gamma_0(N), the
/// scalar lambda (numerator and denominator at most 12) and the Fricke sign.
/// Throws InternalError if no admissible lambda exists.
ParamMap make_param_map(const CurveQ& E, Prec prec = 256);

struct PhiValue {
  PrecComplex z;       // in the fundamental parallelogram of Lambda_E
  ComplexPoint point;  // on the caller's model
};

/// phi at a point of the upper half plane, moved by Gamma_0(N) and w_N to
/// maximize Im(tau) before summing.
PhiValue phi_eval(const ParamMap& pm, const PrecComplex& tau);

/// phi at a cusp: nullopt is i oo; a rational a/c is supported when N | c
/// (equivalent to i oo) or gcd(c, N) = 1 (equivalent to 0).
PhiValue phi_eval_cusp(const ParamMap& pm, const std::optional<mpq_class>& cusp);

/// The series sum_{n <= T} a_n / n q^n at tau with its certified tail,
/// T chosen for the precision of tau.
PrecComplex newform_integral(const ParamMap& pm, const PrecComplex& tau);

/// Point of the caller's model from a complex point of the minimal model.
ComplexPoint to_caller_model(const ParamMap& pm, const ComplexPoint& P);
ComplexPoint to_minimal_model(const ParamMap& pm, const ComplexPoint& P);

/// Order of z in C / Lambda_E if it is at most max_order (k z in the lattice
/// within err for the least such k), else 0.
long torsion_order_of(const Lattice2& L, const PrecComplex& z, long max_order = 12);

struct HeegnerEntry {
  TauPoint tau;
  PrecComplex z;
  ComplexPoint point;
  std::optional<IntPoly> x_minpoly;  // recognized minimal polynomial of x
  std::optional<Point> rational;     // when x and y are rational
};

struct HeegnerResult {
  long disc = 0;
  long class_number = 0;
  std::vector<HeegnerEntry> points;
  PrecComplex trace_z;
  ComplexPoint trace;
  std::optional<Point> trace_rational;
};

/// phi at every Heegner form of discriminant d and level N, recognition of the
/// x-coordinates with degree bound h(d), and the trace of the conjugates.
/// Throws InvalidInput("Heegner hypothesis fails") when there is no form.
HeegnerResult heegner_point(const ParamMap& pm, const Disc& d);

/// phi composed with the degree-M Hecke correspondence.
struct CorrespondenceSpec {
  std::shared_ptr<const ParamMap> pm;
  int M = 1;
};

struct VImage {
  PrecComplex tau;  // the point of the upper half plane that phi was applied to
  PhiValue value;
};

/// For M = 1 the single image phi(s); for M > 1, phi at (a s + b) / d over the
/// psi(M) cyclic isogeny matrices.
std::vector<VImage> v_images(const CorrespondenceSpec& cs, const TauPoint& s);
std::vector<VImage> v_images(const CorrespondenceSpec& cs, const PrecComplex& tau);

/// Rational point of the caller's model near P, if x and y are recognized as
/// rationals of height at most height_bound.
std::optional<Point> recognize_rational_point(const CurveQ& E, const ComplexPoint& P,
                                              const mpz_class& height_bound, Prec prec);

}  // namespace cmrel
