#include "cmrel/numerics/qseries.hpp"

#include "cmrel/error.hpp"

namespace cmrel {

QSeries::QSeries(int valuation, std::vector<mpq_class> coeffs, Mag tail_k, Mag tail_r)
    : valuation_(valuation), coeffs_(std::move(coeffs)), tail_k_(std::move(tail_k)),
      tail_r_(std::move(tail_r)) {
  if (coeffs_.empty()) coeffs_.push_back(0);
}

const mpq_class& QSeries::coeff(int n) const {
  static const mpq_class zero = 0;
  int k = n - valuation_;
  if (k < 0 || k >= static_cast<int>(coeffs_.size())) return zero;
  return coeffs_[static_cast<size_t>(k)];
}

Mag QSeries::tail_bound(const Mag& qabs) const {
  if (tail_k_.is_zero()) return Mag();
  Mag x = tail_r_ * qabs;
  Mag one(1.0);
  if (!(x < one)) return Mag::infinity();
  Mag denom = one.sub_to_lower(x);
  return (tail_k_ * x.pow_upper(truncation() + 1)).div_upper(denom);
}

QSeries QSeries::truncated(int new_t) const {
  int keep = new_t - valuation_ + 1;
  if (keep < 1 || keep > static_cast<int>(coeffs_.size())) throw InvalidInput("bad truncation");
  std::vector<mpq_class> c(coeffs_.begin(), coeffs_.begin() + keep);
  return QSeries(valuation_, std::move(c), tail_k_, tail_r_);
}

PrecComplex eval_qseries_at_q(const QSeries& s, const PrecComplex& q) {
  const Prec p = q.prec();
  const auto& c = s.coeffs();
  const size_t m = c.size();

  // Horner on the midpoint; the radius is bounded through the majorant
  // series M(x) = sum |c_k| x^k.
  Complex acc(p);
  for (size_t k = m; k-- > 0;) {
    acc *= q.mid();
    if (c[k] != 0) acc.re += Real(c[k], p);
  }
  Mag qb = Mag::from_abs_upper(q.mid()) + q.err();
  // M(x) = sum |c_k| x^k; the input radius r moves the value by at most
  // M(|q|+r) - M(|q|) <= r M'(|q|+r).
  Mag maj_b, dmaj_b;
  for (size_t k = m; k-- > 0;) {
    Mag ck = c[k] == 0 ? Mag() : Mag::from_real_upper(Real(c[k], 64)) * Mag(1.0 + 1e-15);
    maj_b = maj_b * qb + ck;
    if (k > 0) dmaj_b = dmaj_b * qb + ck * Mag(static_cast<double>(k));
  }
  Mag err = q.err() * dmaj_b;
  err += maj_b * Mag(static_cast<double>(4 * m + 8)) * ulp_rel(p, 0);
  err += s.tail_bound(qb);

  PrecComplex body(std::move(acc), std::move(err));
  int v = s.valuation();
  if (v == 0) return body;
  return body * pow(q, v);
}

PrecComplex eval_qseries(const QSeries& s, const PrecComplex& tau) {
  if (!(tau.im().sign() > 0)) throw InvalidInput("not in upper half plane");
  return eval_qseries_at_q(s, qexp(tau));
}

}  // namespace cmrel
