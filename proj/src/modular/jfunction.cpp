#include "cmrel/modular/jfunction.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include "cmrel/error.hpp"

namespace cmrel {

namespace {

using Series = std::vector<mpz_class>;

Series mul_trunc(const Series& a, const Series& b, size_t len) {
  Series r(len);
  for (size_t i = 0; i < len && i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; i + j < len && j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

// Coefficients of q j(q) = E4^3 / prod (1 - q^n)^24, indices 0..len-1.
Series qj_coefficients(size_t len) {
  Series e4(len);
  e4[0] = 1;
  for (size_t n = 1; n < len; ++n) {
    mpz_class s = 0;
    for (size_t d = 1; d <= n; ++d)
      if (n % d == 0) s += mpz_class(static_cast<unsigned long>(d)) * d * d;
    e4[n] = 240 * s;
  }
  Series e4cube = mul_trunc(mul_trunc(e4, e4, len), e4, len);

  // Euler's pentagonal theorem for prod (1 - q^n)
  Series eta(len);
  for (long k = 0;; ++k) {
    bool any = false;
    for (long s : {k, -k}) {
      if (k == 0 && s == -k && s != 0) continue;
      long idx = s * (3 * s - 1) / 2;
      if (idx < 0 || static_cast<size_t>(idx) >= len) continue;
      any = true;
      if (k == 0 && s != 0) continue;
      eta[static_cast<size_t>(idx)] = (k % 2 == 0) ? 1 : -1;
      if (k == 0) break;
    }
    if (!any && k > 0) break;
  }
  Series p2 = mul_trunc(eta, eta, len);
  Series p4 = mul_trunc(p2, p2, len);
  Series p8 = mul_trunc(p4, p4, len);
  Series p16 = mul_trunc(p8, p8, len);
  Series p24 = mul_trunc(p16, p8, len);

  Series r(len);
  for (size_t n = 0; n < len; ++n) {
    mpz_class v = e4cube[n];
    for (size_t k = 1; k <= n; ++k) v -= p24[k] * r[n - k];
    r[n] = v;
  }
  return r;
}

std::mutex g_j_mutex;
Series g_qj;  // g_qj[k] = c(k - 1)

void ensure_coefficients(int T) {
  size_t need = static_cast<size_t>(T) + 2;
  if (g_qj.size() >= need) return;
  size_t len = std::max(need, 2 * g_qj.size());
  g_qj = qj_coefficients(len);
}

double log_abs_upper(const Mag& m) {
  if (m.is_zero()) return -1e300;
  Real r = m.to_real(64);
  long e = r.exponent();
  return (static_cast<double>(e) + std::log2(mul_2si(r, -e).to_double())) * M_LN2;
}

}  // namespace

mpz_class j_coefficient(int n) {
  if (n < -1) return 0;
  std::lock_guard<std::mutex> lock(g_j_mutex);
  ensure_coefficients(n);
  return g_qj[static_cast<size_t>(n + 1)];
}

QSeries j_series(int T) {
  if (T < 4) T = 4;
  std::vector<mpq_class> c;
  {
    std::lock_guard<std::mutex> lock(g_j_mutex);
    ensure_coefficients(T);
    c.reserve(static_cast<size_t>(T) + 2);
    for (int k = 0; k <= T + 1; ++k) c.emplace_back(g_qj[static_cast<size_t>(k)]);
  }
  double sq = std::sqrt(static_cast<double>(T));
  Mag K = Mag::from_real_upper(exp(Real::from_double(2 * M_PI * sq * (1 + 1e-12), 64)));
  Mag R = Mag::from_real_upper(exp(Real::from_double(2 * M_PI / sq * (1 + 1e-12), 64)));
  return QSeries(-1, std::move(c), K, R);
}

int j_truncation_for(const Mag& qabs, long bits) {
  double lq = log_abs_upper(qabs);
  for (int T = 4; T < 200000; ++T) {
    double sq = std::sqrt(static_cast<double>(T));
    double lr = 2 * M_PI / sq + lq;
    if (lr >= 0) continue;
    double lt = 2 * M_PI * sq + (T + 1) * lr - std::log1p(-std::exp(lr));
    if (lt / M_LN2 < -static_cast<double>(bits)) return T;
  }
  throw Indeterminate("q too large for the j series");
}

std::pair<PrecComplex, MobiusMap> reduce_to_fundamental_domain(const PrecComplex& tau_in) {
  if (!(tau_in.im().sign() > 0)) throw InvalidInput("not in upper half plane");
  const Prec p = tau_in.prec();
  PrecComplex tau = tau_in;
  MobiusMap g = MobiusMap::identity();
  PrecComplex one = PrecComplex::exact(1, 0, p);
  for (int it = 0; it < 10000; ++it) {
    mpz_class n = tau.re().round();
    if (n != 0) {
      long k = n.get_si();
      tau -= PrecComplex::exact(k, 0, p);
      g = MobiusMap::translation(-k) * g;
    }
    if (norm(tau.mid()) < 1) {
      tau = -(one / tau);
      g = MobiusMap::inversion() * g;
      continue;
    }
    break;
  }
  // Boundary canonicalization with a tolerance tied to the radius.
  Mag tol = (tau.err() + Mag::pow2(10 - static_cast<long>(p))).mul_2si(2);
  Real half = Real::from_double(0.5, p);
  if (Mag::from_real_upper(tau.re() + half) <= tol) {
    tau += one;
    g = MobiusMap::translation(1) * g;
  }
  Real r2 = norm(tau.mid()) - Real(1, p);
  if (Mag::from_real_upper(r2) <= tol.mul_2si(2) && tau.re().sign() < 0) {
    tau = -(one / tau);
    g = MobiusMap::inversion() * g;
  }
  return {tau, g};
}

PrecComplex j_of_q(const PrecComplex& q) {
  int T = j_truncation_for(q.abs_upper(), static_cast<long>(q.prec()) + 10);
  return eval_qseries_at_q(j_series(T), q);
}

PrecComplex j_prime_of_q(const PrecComplex& q) {
  int T = j_truncation_for(q.abs_upper(), static_cast<long>(q.prec()) + 10);
  QSeries s = j_series(T);
  std::vector<mpq_class> d;
  for (int n = -1; n <= s.truncation(); ++n) d.push_back(s.coeff(n) * n);
  return eval_qseries_at_q(QSeries(-2, std::move(d), Mag(), Mag()), q);
}

PrecComplex j_invariant(const PrecComplex& tau, Prec prec) {
  PrecComplex t = tau.prec() == prec ? tau : tau.with_prec(prec);
  auto [red, g] = reduce_to_fundamental_domain(t);
  (void)g;
  return j_of_q(qexp(red));
}

PrecComplex j_invariant(const TauPoint& t, Prec prec) { return j_invariant(t.value(prec), prec); }

}  // namespace cmrel
