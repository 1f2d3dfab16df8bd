#include "cmrel/numerics/ball.hpp"

#include "cmrel/error.hpp"

namespace cmrel {

Mag rounding_err(const Complex& mid) {
  return Mag::from_abs_upper(mid) * ulp_rel(mid.prec(), 1);
}

PrecComplex PrecComplex::exact(long re, long im, Prec prec) {
  // Integers up to 63 bits are exact at prec >= 64.
  return PrecComplex(Complex(Real(re, prec), Real(im, prec)));
}

PrecComplex PrecComplex::rational(const mpq_class& re, const mpq_class& im, Prec prec) {
  Complex c(Real(re, prec), Real(im, prec));
  Mag e = rounding_err(c);
  return PrecComplex(std::move(c), std::move(e));
}

PrecComplex PrecComplex::from_real(const Real& x, Mag err) {
  return PrecComplex(Complex(x), std::move(err));
}

PrecComplex PrecComplex::pi(Prec prec) {
  Complex c(Real::pi(prec));
  Mag e = rounding_err(c);
  return PrecComplex(std::move(c), std::move(e));
}

PrecComplex PrecComplex::i_pi(Prec prec) {
  Complex c(Real(prec), Real::pi(prec));
  Mag e = rounding_err(c);
  return PrecComplex(std::move(c), std::move(e));
}

PrecComplex PrecComplex::with_prec(Prec p) const {
  PrecComplex r(mid_.with_prec(p), err_);
  if (p < prec()) r.err_ += rounding_err(r.mid_);
  return r;
}

Mag PrecComplex::abs_upper() const { return Mag::from_abs_upper(mid_) + err_; }

Mag PrecComplex::abs_lower() const { return Mag::from_abs_lower(mid_).sub_to_lower(err_); }

bool PrecComplex::contains_zero() const { return Mag::from_abs_lower(mid_) <= err_; }

bool PrecComplex::im_positive() const { return err_ < mid_.im; }

PrecComplex& PrecComplex::operator+=(const PrecComplex& o) {
  mid_ += o.mid_;
  err_ += o.err_;
  err_ += rounding_err(mid_);
  return *this;
}

PrecComplex& PrecComplex::operator-=(const PrecComplex& o) {
  mid_ -= o.mid_;
  err_ += o.err_;
  err_ += rounding_err(mid_);
  return *this;
}

PrecComplex& PrecComplex::operator*=(const PrecComplex& o) {
  Mag a = Mag::from_abs_upper(mid_);
  Mag b = Mag::from_abs_upper(o.mid_);
  Mag e = a * o.err_ + b * err_ + err_ * o.err_;
  e += (a * b) * ulp_rel(std::max(prec(), o.prec()), 2);
  mid_ *= o.mid_;
  err_ = std::move(e);
  return *this;
}

PrecComplex& PrecComplex::operator/=(const PrecComplex& o) {
  Mag a = Mag::from_abs_upper(mid_);
  Mag b = Mag::from_abs_lower(o.mid_);
  Mag bl = b.sub_to_lower(o.err_);
  if (bl.is_zero()) throw Indeterminate("division by a ball containing zero");
  Mag e = (a * o.err_ + Mag::from_abs_upper(o.mid_) * err_).div_upper(b * bl);
  e += a.div_upper(b) * ulp_rel(std::max(prec(), o.prec()), 3);
  mid_ /= o.mid_;
  err_ = std::move(e);
  return *this;
}

PrecComplex operator*(const PrecComplex& a, long k) {
  Complex m(a.mid_.re * k, a.mid_.im * k);
  Mag e = a.err_ * Mag(static_cast<double>(k < 0 ? -k : k));
  e += rounding_err(m);
  return PrecComplex(std::move(m), std::move(e));
}

PrecComplex operator*(const PrecComplex& a, const mpz_class& k) {
  Real kr(k, a.prec());
  Complex m(a.mid_.re * kr, a.mid_.im * kr);
  Mag e = a.err_ * Mag::from_real_upper(kr) * (Mag(1.0) + ulp_rel(a.prec(), 1));
  e += rounding_err(m).mul_2si(1);
  return PrecComplex(std::move(m), std::move(e));
}

PrecComplex operator/(const PrecComplex& a, long k) {
  Complex m(a.mid_.re / k, a.mid_.im / k);
  Mag e = a.err_.div_upper(Mag::from_real_lower(Real(k, 64)));
  e += rounding_err(m);
  return PrecComplex(std::move(m), std::move(e));
}

PrecComplex exp(const PrecComplex& z) {
  Complex m = exp(z.mid());
  Mag mag = Mag::from_abs_upper(m);
  Mag e = mag * z.err().expm1_upper();
  // |e^{a+d}| <= |e^a| e^r: include the factor on the rounding term too
  e += mag * ulp_rel(z.prec(), 4) * (Mag(1.0) + z.err().expm1_upper());
  return PrecComplex(std::move(m), std::move(e));
}

PrecComplex sqrt(const PrecComplex& z) {
  Complex m = sqrt(z.mid());
  Mag lo = Mag::from_abs_lower(z.mid()).sub_to_lower(z.err());
  Mag e;
  if (!z.err().is_zero()) {
    if (lo.is_zero()) {
      e = Mag::infinity();
    } else {
      // |sqrt(a+d) - sqrt(a)| <= r / sqrt(|a| - r)
      Real lr = lo.to_real(64);
      mpfr_sqrt(lr.get(), lr.get(), MPFR_RNDD);
      e = z.err().div_upper(Mag::from_real_lower(lr));
    }
  }
  e += Mag::from_abs_upper(m) * ulp_rel(z.prec(), 3);
  return PrecComplex(std::move(m), std::move(e));
}

PrecComplex log(const PrecComplex& z) {
  Complex m = log(z.mid());
  Mag lo = z.abs_lower();
  if (lo.is_zero()) throw Indeterminate("log of a ball containing zero");
  // |log(a+d) - log a| <= -log(1 - r/|a|) <= (r/|a|) / (1 - r/|a|)
  Mag rel = z.err().div_upper(Mag::from_abs_lower(z.mid()));
  Mag one(1.0);
  Mag denom = one.sub_to_lower(rel);
  Mag e = denom.is_zero() ? Mag::infinity() : rel.div_upper(denom);
  e += Mag::from_abs_upper(m) * ulp_rel(z.prec(), 3) + ulp_rel(z.prec(), 2);
  return PrecComplex(std::move(m), std::move(e));
}

PrecComplex pow(const PrecComplex& z, long k) {
  if (k < 0) return PrecComplex::exact(1, 0, z.prec()) / pow(z, -k);
  PrecComplex result = PrecComplex::exact(1, 0, z.prec());
  PrecComplex base = z;
  while (k > 0) {
    if (k & 1) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

PrecComplex qexp(const PrecComplex& tau) {
  PrecComplex two_pi_i = PrecComplex::i_pi(tau.prec()) * 2;
  return exp(two_pi_i * tau);
}

}  // namespace cmrel
