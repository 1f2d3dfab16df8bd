#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>

namespace cmrel {

using Prec = mpfr_prec_t;

inline constexpr Prec kDefaultPrec = 256;
inline constexpr Prec kMinPrec = 64;

/// RAII wrapper around an MPFR float. Binary operations produce a result at
/// the larger of the two operand precisions, rounded to nearest.
class Real {
 public:
  explicit Real(Prec prec = 64);
  Real(long v, Prec prec);
  Real(const mpz_class& v, Prec prec);
  Real(const mpq_class& v, Prec prec);
  static Real from_double(double v, Prec prec);
  static Real from_string(const std::string& s, Prec prec);
  static Real pi(Prec prec);
  static Real log2(Prec prec);

  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  ~Real();

  Prec prec() const { return mpfr_get_prec(v_); }
  Real with_prec(Prec p) const;

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long exponent() const;  // e with 2^(e-1) <= |x| < 2^e; very negative for 0
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  mpz_class round() const;
  mpz_class floor() const;
  mpq_class to_rational() const;  // exact dyadic value
  std::string to_string(int digits) const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  friend Real operator*(Real a, long b);
  friend Real operator/(Real a, long b);
  friend Real operator+(Real a, long b);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& y);
Real mul_2si(const Real& x, long e);
Real hypot(const Real& x, const Real& y);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

/// Complex number as a pair of Reals.
struct Complex {
  Real re;
  Real im;

  explicit Complex(Prec prec = 64) : re(prec), im(prec) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  explicit Complex(Real r) : re(std::move(r)), im(re.prec()) {}
  static Complex from_double(double r, double i, Prec prec);

  Prec prec() const { return re.prec() > im.prec() ? re.prec() : im.prec(); }
  Complex with_prec(Prec p) const { return {re.with_prec(p), im.with_prec(p)}; }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex operator-() const { return {-re, -im}; }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
  friend Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
};

Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real arg(const Complex& z);
Complex conj(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex polar(const Real& r, const Real& theta);

/// Nonnegative magnitude bound kept at low precision with upward rounding.
/// Used for error radii; survives exponents far beyond double range.
class Mag {
 public:
  Mag();
  explicit Mag(double v);
  static Mag from_real_upper(const Real& x);   // >= |x|
  static Mag from_real_lower(const Real& x);   // <= |x|
  static Mag from_abs_upper(const Complex& z);  // >= |z|
  static Mag from_abs_lower(const Complex& z);  // <= |z|
  static Mag pow2(long e);
  static Mag infinity();

  Mag(const Mag& o);
  Mag(Mag&& o) noexcept;
  Mag& operator=(const Mag& o);
  Mag& operator=(Mag&& o) noexcept;
  ~Mag();

  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDU); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  long exponent() const;
  Real to_real(Prec prec) const;

  Mag& operator+=(const Mag& o);
  Mag& operator*=(const Mag& o);
  friend Mag operator+(Mag a, const Mag& b) { return a += b; }
  friend Mag operator*(Mag a, const Mag& b) { return a *= b; }
  Mag mul_2si(long e) const;
  /// Lower bound on a - b (a lower bound, b upper bound), clamped at 0.
  Mag sub_to_lower(const Mag& b) const;
  Mag div_upper(const Mag& b) const;  // upper bound of this / b (b lower bound)
  Mag sqrt_upper() const;
  Mag expm1_upper() const;  // e^x - 1, upward
  Mag pow_upper(long k) const;

  friend bool operator<(const Mag& a, const Mag& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Mag& a, const Mag& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend Mag max(const Mag& a, const Mag& b) { return a < b ? b : a; }

 private:
  static constexpr Prec kMagPrec = 32;
  mpfr_t v_;
};

bool operator<(const Mag& a, const Real& b);

}  // namespace cmrel
