#pragma once

#include <string>
#include <vector>

#include "cmrel/numerics/ball.hpp"
#include "cmrel/numerics/poly.hpp"

namespace cmrel {

/// Negative discriminant, 0 or 1 mod 4.
class Disc {
 public:
  explicit Disc(long value);  // throws InvalidInput("invalid discriminant")
  long value() const { return value_; }
  long abs() const { return -value_; }
  bool operator==(const Disc& o) const = default;
  auto operator<=>(const Disc& o) const = default;

 private:
  long value_;
};

bool is_valid_discriminant(long d);

/// Fundamental discriminant d0 and conductor f with d = d0 f^2.
std::pair<long, long> fundamental_part(long d);

/// Integral 2x2 matrix acting by Moebius transformation.
struct MobiusMap {
  long a = 1, b = 0, c = 0, d = 1;

  static MobiusMap identity() { return {}; }
  static MobiusMap translation(long k) { return {1, k, 0, 1}; }
  static MobiusMap inversion() { return {0, -1, 1, 0}; }

  long det() const { return a * d - b * c; }
  MobiusMap operator*(const MobiusMap& o) const;  // (this o o)(tau) = this(o(tau))
  MobiusMap inverse() const;                      // for det 1
  PrecComplex apply(const PrecComplex& tau) const;
  bool operator==(const MobiusMap& o) const = default;
  std::string to_string() const;
};

/// Primitive positive definite form a x^2 + b x y + c y^2.
struct QuadForm {
  long a = 1, b = 0, c = 1;

  long disc() const { return b * b - 4 * a * c; }
  bool is_reduced() const;
  bool is_primitive() const;
  auto operator<=>(const QuadForm& o) const = default;
  std::string to_string() const;
};

/// Reduced form equivalent to f; gamma (if given) satisfies tau_{result} = gamma(tau_f).
QuadForm reduce_form(const QuadForm& f, MobiusMap* gamma = nullptr);

/// Form whose root is g(tau_f) for an integral g with positive determinant,
/// made primitive with positive leading coefficient.
QuadForm transform_form(const QuadForm& f, const MobiusMap& g);

/// CM point (-b + sqrt(disc)) / (2a) in the upper half plane.
class TauPoint {
 public:
  TauPoint() = default;
  explicit TauPoint(const QuadForm& f);
  const QuadForm& form() const { return form_; }
  long disc() const { return form_.disc(); }
  PrecComplex value(Prec prec) const;
  std::string to_string() const;
  bool operator==(const TauPoint& o) const { return form_ == o.form_; }

 private:
  QuadForm form_;
};

std::vector<QuadForm> reduced_forms(const Disc& d);
long class_number(const Disc& d);

/// Smallest beta in [0, 2N) with beta^2 = d mod 4N, or -1.
long heegner_beta(const Disc& d, long N);

/// One form (A, B, C) per class with N | A and B = beta mod 2N; listed in the
/// order of the reduced representatives.
std::vector<QuadForm> heegner_forms(const Disc& d, long N);

TauPoint tau_of_form(const QuadForm& f);

/// Monic integer polynomial prod (X - j(tau_f)) over reduced forms, with the
/// working precision raised until every coefficient rounds within 1/4.
IntPoly hilbert_class_poly(const Disc& d, Prec prec = kDefaultPrec);

/// Same, also returning the certified root balls at the final precision and
/// the precision actually used.
struct ClassPolyResult {
  IntPoly poly;
  std::vector<PrecComplex> roots;
  Prec prec_used = 0;
};
ClassPolyResult hilbert_class_poly_full(const Disc& d, Prec prec = kDefaultPrec);

}  // namespace cmrel
