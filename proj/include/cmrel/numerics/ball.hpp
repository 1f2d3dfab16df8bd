#pragma once

#include <gmpxx.h>

#include "cmrel/numerics/real.hpp"

namespace cmrel {

/// Complex midpoint with an absolute error radius. Every operation returns a
/// radius that covers both the propagated input error and its own rounding.
class PrecComplex {
 public:
  explicit PrecComplex(Prec prec = kDefaultPrec) : mid_(prec) {}
  PrecComplex(Complex mid, Mag err = Mag()) : mid_(std::move(mid)), err_(std::move(err)) {}

  static PrecComplex exact(long re, long im, Prec prec);
  static PrecComplex rational(const mpq_class& re, const mpq_class& im, Prec prec);
  static PrecComplex from_real(const Real& x, Mag err = Mag());
  static PrecComplex pi(Prec prec);
  static PrecComplex i_pi(Prec prec);  // pi * i

  const Complex& mid() const { return mid_; }
  const Real& re() const { return mid_.re; }
  const Real& im() const { return mid_.im; }
  const Mag& err() const { return err_; }
  Prec prec() const { return mid_.prec(); }

  void add_err(const Mag& e) { err_ += e; }
  PrecComplex with_prec(Prec p) const;

  Mag abs_upper() const;
  Mag abs_lower() const;
  bool contains_zero() const;
  /// True when every point of the ball has Im > 0.
  bool im_positive() const;

  PrecComplex& operator+=(const PrecComplex& o);
  PrecComplex& operator-=(const PrecComplex& o);
  PrecComplex& operator*=(const PrecComplex& o);
  PrecComplex& operator/=(const PrecComplex& o);
  PrecComplex operator-() const { return PrecComplex(-mid_, err_); }

  friend PrecComplex operator+(PrecComplex a, const PrecComplex& b) { return a += b; }
  friend PrecComplex operator-(PrecComplex a, const PrecComplex& b) { return a -= b; }
  friend PrecComplex operator*(PrecComplex a, const PrecComplex& b) { return a *= b; }
  friend PrecComplex operator/(PrecComplex a, const PrecComplex& b) { return a /= b; }
  friend PrecComplex operator*(const PrecComplex& a, long k);
  friend PrecComplex operator*(const PrecComplex& a, const mpz_class& k);
  friend PrecComplex operator/(const PrecComplex& a, long k);

 private:
  Complex mid_;
  Mag err_;
};

PrecComplex exp(const PrecComplex& z);
PrecComplex sqrt(const PrecComplex& z);
PrecComplex log(const PrecComplex& z);  // principal branch; ball must avoid the negative axis
PrecComplex pow(const PrecComplex& z, long k);
/// e^{2 pi i tau}
PrecComplex qexp(const PrecComplex& tau);

/// Rounding error of a value just stored at precision p: 2^{1-p} |mid|.
Mag rounding_err(const Complex& mid);

/// Relative half-ulp radius for p bits.
inline Mag ulp_rel(Prec p, long extra = 1) { return Mag::pow2(extra - static_cast<long>(p)); }

}  // namespace cmrel
