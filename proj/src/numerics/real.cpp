#include "cmrel/numerics/real.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace cmrel {

namespace {

Prec max_prec(const Real& a, const Real& b) { return std::max(a.prec(), b.prec()); }

// Result precision follows the wider operand.
template <typename F>
Real binary(const Real& a, const Real& b, F f) {
  Real r(max_prec(a, b));
  f(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real::Real(Prec prec) {
  mpfr_init2(v_, std::max<Prec>(prec, MPFR_PREC_MIN));
  mpfr_set_zero(v_, 1);
}

Real::Real(long v, Prec prec) : Real(prec) { mpfr_set_si(v_, v, MPFR_RNDN); }

Real::Real(const mpz_class& v, Prec prec) : Real(prec) { mpfr_set_z(v_, v.get_mpz_t(), MPFR_RNDN); }

Real::Real(const mpq_class& v, Prec prec) : Real(prec) { mpfr_set_q(v_, v.get_mpq_t(), MPFR_RNDN); }

Real Real::from_double(double v, Prec prec) {
  Real r(prec);
  mpfr_set_d(r.v_, v, MPFR_RNDN);
  return r;
}

Real Real::from_string(const std::string& s, Prec prec) {
  Real r(prec);
  if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("not a decimal number: " + s);
  }
  return r;
}

Real Real::pi(Prec prec) {
  Real r(prec);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

Real Real::log2(Prec prec) {
  Real r(prec);
  mpfr_const_log2(r.v_, MPFR_RNDN);
  return r;
}

Real::Real(const Real& o) {
  mpfr_init2(v_, o.prec());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
  if (this != &o) {
    mpfr_set_prec(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::with_prec(Prec p) const {
  Real r(p);
  mpfr_set(r.v_, v_, MPFR_RNDN);
  return r;
}

long Real::exponent() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  return mpfr_get_exp(v_);
}

mpz_class Real::round() const {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
  return z;
}

mpz_class Real::floor() const {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
  return z;
}

mpq_class Real::to_rational() const {
  mpq_class q;
  if (mpfr_zero_p(v_)) return q;
  mpz_class m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
  if (e >= 0) {
    mpz_class s = m;
    mpz_mul_2exp(s.get_mpz_t(), s.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    q = s;
  } else {
    mpz_class d = 1;
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    q = mpq_class(m, d);
    q.canonicalize();
  }
  return q;
}

std::string Real::to_string(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

Real& Real::operator+=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

Real operator*(Real a, long b) {
  mpfr_mul_si(a.v_, a.v_, b, MPFR_RNDN);
  return a;
}

Real operator/(Real a, long b) {
  mpfr_div_si(a.v_, a.v_, b, MPFR_RNDN);
  return a;
}

Real operator+(Real a, long b) {
  mpfr_add_si(a.v_, a.v_, b, MPFR_RNDN);
  return a;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.v_, b.v_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

Real abs(const Real& x) {
  Real r(x.prec());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real sqrt(const Real& x) {
  Real r(x.prec());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real exp(const Real& x) {
  Real r(x.prec());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real log(const Real& x) {
  Real r(x.prec());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real sin(const Real& x) {
  Real r(x.prec());
  mpfr_sin(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real cos(const Real& x) {
  Real r(x.prec());
  mpfr_cos(r.get(), x.get(), MPFR_RNDN);
  return r;
}

Real atan2(const Real& y, const Real& x) { return binary(y, x, mpfr_atan2); }

Real pow(const Real& x, const Real& y) { return binary(x, y, mpfr_pow); }

Real mul_2si(const Real& x, long e) {
  Real r(x.prec());
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

Real hypot(const Real& x, const Real& y) { return binary(x, y, mpfr_hypot); }

Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real min(const Real& a, const Real& b) { return b < a ? b : a; }

// ---------------------------------------------------------------- Complex

Complex Complex::from_double(double r, double i, Prec prec) {
  return {Real::from_double(r, prec), Real::from_double(i, prec)};
}

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  Real i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  Real d = o.re * o.re + o.im * o.im;
  Real r = (re * o.re + im * o.im) / d;
  Real i = (im * o.re - re * o.im) / d;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Real abs(const Complex& z) { return hypot(z.re, z.im); }

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real arg(const Complex& z) { return atan2(z.im, z.re); }

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Complex exp(const Complex& z) {
  Real m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}

Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }

Complex sqrt(const Complex& z) {
  // Principal branch: Re >= 0.
  Real r = abs(z);
  if (r.is_zero()) return Complex(z.prec());
  Real a = sqrt((r + abs(z.re)) / 2);
  if (z.re.sign() >= 0) {
    Real b = z.im / (a * 2);
    return {a, b};
  }
  Real b = abs(z.im) / (a * 2);
  if (z.im.sign() < 0) return {b, -a};
  return {b, a};
}

Complex polar(const Real& r, const Real& theta) { return {r * cos(theta), r * sin(theta)}; }

// ---------------------------------------------------------------- Mag

Mag::Mag() {
  mpfr_init2(v_, kMagPrec);
  mpfr_set_zero(v_, 1);
}

Mag::Mag(double v) : Mag() { mpfr_set_d(v_, v < 0 ? -v : v, MPFR_RNDU); }

Mag Mag::from_real_upper(const Real& x) {
  Mag m;
  mpfr_abs(m.v_, x.get(), MPFR_RNDU);
  return m;
}

Mag Mag::from_real_lower(const Real& x) {
  Mag m;
  mpfr_abs(m.v_, x.get(), MPFR_RNDD);
  return m;
}

Mag Mag::from_abs_upper(const Complex& z) {
  Mag m;
  mpfr_hypot(m.v_, z.re.get(), z.im.get(), MPFR_RNDU);
  return m;
}

Mag Mag::from_abs_lower(const Complex& z) {
  Mag m;
  mpfr_hypot(m.v_, z.re.get(), z.im.get(), MPFR_RNDD);
  return m;
}

Mag Mag::pow2(long e) {
  Mag m;
  mpfr_set_ui_2exp(m.v_, 1, e, MPFR_RNDU);
  return m;
}

Mag Mag::infinity() {
  Mag m;
  mpfr_set_inf(m.v_, 1);
  return m;
}

Mag::Mag(const Mag& o) {
  mpfr_init2(v_, kMagPrec);
  mpfr_set(v_, o.v_, MPFR_RNDU);
}

Mag::Mag(Mag&& o) noexcept {
  mpfr_init2(v_, kMagPrec);
  mpfr_swap(v_, o.v_);
}

Mag& Mag::operator=(const Mag& o) {
  if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDU);
  return *this;
}

Mag& Mag::operator=(Mag&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Mag::~Mag() { mpfr_clear(v_); }

long Mag::exponent() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  if (mpfr_inf_p(v_)) return 1L << 40;
  return mpfr_get_exp(v_);
}

Real Mag::to_real(Prec prec) const {
  Real r(prec);
  mpfr_set(r.get(), v_, MPFR_RNDU);
  return r;
}

Mag& Mag::operator+=(const Mag& o) {
  mpfr_add(v_, v_, o.v_, MPFR_RNDU);
  return *this;
}

Mag& Mag::operator*=(const Mag& o) {
  if (is_zero() || o.is_zero()) {
    mpfr_set_zero(v_, 1);
    return *this;
  }
  mpfr_mul(v_, v_, o.v_, MPFR_RNDU);
  return *this;
}

Mag Mag::mul_2si(long e) const {
  Mag m(*this);
  mpfr_mul_2si(m.v_, m.v_, e, MPFR_RNDU);
  return m;
}

Mag Mag::sub_to_lower(const Mag& b) const {
  Mag m;
  mpfr_sub(m.v_, v_, b.v_, MPFR_RNDD);
  if (mpfr_sgn(m.v_) < 0) mpfr_set_zero(m.v_, 1);
  return m;
}

Mag Mag::div_upper(const Mag& b) const {
  Mag m;
  if (b.is_zero()) return infinity();
  mpfr_div(m.v_, v_, b.v_, MPFR_RNDU);
  return m;
}

Mag Mag::sqrt_upper() const {
  Mag m;
  mpfr_sqrt(m.v_, v_, MPFR_RNDU);
  return m;
}

Mag Mag::expm1_upper() const {
  Mag m;
  mpfr_expm1(m.v_, v_, MPFR_RNDU);
  return m;
}

Mag Mag::pow_upper(long k) const {
  Mag m;
  mpfr_pow_si(m.v_, v_, k, MPFR_RNDU);
  return m;
}

bool operator<(const Mag& a, const Real& b) { return mpfr_less_p(a.get(), b.get()) != 0; }

}  // namespace cmrel
