#include "cmrel/elliptic/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "cmrel/error.hpp"
#include "cmrel/modular/jfunction.hpp"
#include "cmrel/numerics/poly.hpp"

namespace cmrel {

namespace {

PrecComplex exact_mid(const Complex& z) { return PrecComplex(z, Mag()); }

// AGM of positive reals a +- ea, b +- eb. The AGM is monotone and homogeneous,
// so relative input errors carry over unchanged.
std::pair<Real, Mag> agm(const Real& a0, const Mag& ea, const Real& b0, const Mag& eb, Prec p) {
  if (!(a0.sign() > 0) || !(b0.sign() > 0)) throw InternalError("AGM of nonpositive input");
  Real a = a0.with_prec(p + 32), b = b0.with_prec(p + 32);
  Real tol = mul_2si(Real(1, p + 32), -static_cast<long>(p) - 24);
  int steps = 0;
  for (; steps < 10000; ++steps) {
    if (abs(a - b) <= a * tol) break;
    Real an = (a + b) / 2;
    b = sqrt(a * b);
    a = std::move(an);
  }
  if (steps >= 10000) throw InternalError("AGM did not converge");
  Real rel = max(ea.to_real(64) / a0, eb.to_real(64) / b0);
  Mag err = Mag::from_real_upper(a - b) + Mag::from_real_upper(a * rel).mul_2si(1) +
            Mag::from_real_upper(a).mul_2si(4 - static_cast<long>(p)) * Mag(steps + 1.0);
  return {a.with_prec(p), err};
}

// Real part of a ball known to be real, with the stray imaginary part folded into the radius.
std::pair<Real, Mag> real_of(const PrecComplex& z) {
  return {z.re(), z.err() + Mag::from_real_upper(z.im())};
}

// Basis with tau in the fundamental domain and z reduced to the period
// parallelogram centred at 0, in units of the first period.
struct Normalized {
  PrecComplex w1;   // reduced first period
  PrecComplex tau;  // reduced period ratio
  PrecComplex q;
  PrecComplex zp;   // z / w1, |Re| <= 1/2, |Im| <= Im(tau)/2
};

Normalized normalize(const Lattice2& L, const PrecComplex& z) {
  const Prec p = z.prec();
  PrecComplex w1 = L.w1.with_prec(p), w2 = L.w2.with_prec(p);
  auto [tr, g] = reduce_to_fundamental_domain(w2 / w1);
  (void)tr;
  PrecComplex nw1 = w2 * g.c + w1 * g.d;
  PrecComplex nw2 = w2 * g.a + w1 * g.b;
  Normalized n;
  n.w1 = nw1;
  n.tau = nw2 / nw1;
  n.q = qexp(n.tau);
  PrecComplex zp = z / nw1;
  mpz_class k = (zp.im() / n.tau.im()).round();
  zp -= n.tau * k;
  mpz_class m = zp.re().round();
  zp -= PrecComplex::exact(m.get_si(), 0, p);
  n.zp = zp;
  return n;
}

int terms_for(const Mag& qabs, long bits) {
  double lq = std::log2(std::max(qabs.to_double(), 1e-300));
  return static_cast<int>(std::ceil((bits + 8) / -lq)) + 2;
}

}  // namespace

PrecComplex Lattice2::real_volume(const CurveQ& E) const { return E.disc() > 0 ? w1 * 2 : w1; }

std::pair<Real, Real> Lattice2::coordinates(const PrecComplex& z) const {
  Complex a = z.mid() / w1.mid();
  Complex t = w2.mid() / w1.mid();
  Real tt = a.im / t.im;
  Real ss = a.re - tt * t.re;
  return {ss, tt};
}

PrecComplex Lattice2::reduce(const PrecComplex& z) const {
  auto [s, t] = coordinates(z);
  mpz_class fs = s.floor(), ft = t.floor();
  const Prec p = z.prec();
  PrecComplex out = z - w1.with_prec(p) * fs - w2.with_prec(p) * ft;
  // floating point at the parallelogram edge can leave a coordinate at 1
  auto [s2, t2] = coordinates(out);
  if (!(s2 < 1)) out -= w1.with_prec(p);
  if (!(t2 < 1)) out -= w2.with_prec(p);
  return out;
}

double Lattice2::lattice_distance(const PrecComplex& z) const {
  auto [s, t] = coordinates(z);
  Real ds = abs(s - Real(s.round(), s.prec()));
  Real dt = abs(t - Real(t.round(), t.prec()));
  return std::max(ds.to_double(), dt.to_double());
}

Lattice2 periods(const CurveQ& E, Prec prec) {
  const Prec p = prec + 32;
  // 4x^3 + b2 x^2 + 2 b4 x + b6 with denominators cleared
  std::vector<mpq_class> c{E.b6(), 2 * E.b4(), E.b2(), mpq_class(4)};
  mpz_class l = 1;
  for (const auto& q : c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<mpz_class> ci;
  for (const auto& q : c) ci.push_back(mpz_class(q * l));
  auto roots = complex_roots(IntPoly(ci), p);
  PrecComplex pi = PrecComplex::pi(p), ipi = PrecComplex::i_pi(p);
  Lattice2 L;
  if (E.disc() > 0) {
    std::sort(roots.begin(), roots.end(),
              [](const PrecComplex& x, const PrecComplex& y) { return y.re() < x.re(); });
    PrecComplex s13 = sqrt(roots[0] - roots[2]);
    PrecComplex s12 = sqrt(roots[0] - roots[1]);
    PrecComplex s23 = sqrt(roots[1] - roots[2]);
    auto [r13, d13] = real_of(s13);
    auto [r12, d12] = real_of(s12);
    auto [r23, d23] = real_of(s23);
    auto [m1, e1] = agm(r13, d13, r12, d12, p);
    auto [m2, e2] = agm(r13, d13, r23, d23, p);
    L.w1 = pi / PrecComplex::from_real(m1, e1);
    L.w2 = ipi / PrecComplex::from_real(m2, e2);
  } else {
    size_t ir = 0;
    for (size_t i = 1; i < 3; ++i)
      if (abs(roots[i].im()) < abs(roots[ir].im())) ir = i;
    size_t ic = ir == 0 ? 1 : 0;
    if (roots[ic].im().sign() < 0) ic = 3 - ir - ic;
    PrecComplex e1 = PrecComplex::from_real(roots[ir].re(), roots[ir].err());
    PrecComplex w = sqrt(e1 - roots[ic]);
    Real wre = w.re(), wabs = abs(w.mid()), wim = abs(w.im());
    auto [m1, er1] = agm(wre, w.err(), wabs, w.err(), p);
    auto [m2, er2] = agm(wabs, w.err(), wim, w.err(), p);
    L.w1 = pi / PrecComplex::from_real(m1, er1);
    L.w2 = -(L.w1 / 2) + ipi / (PrecComplex::from_real(m2, er2) * 2);
  }
  L.w1 = L.w1.with_prec(prec);
  L.w2 = L.w2.with_prec(prec);
  return L;
}

QSeries eisenstein_series(int k, int T) {
  if (k != 4 && k != 6) throw InvalidInput("weight must be 4 or 6");
  if (T < 8) T = 8;
  const long mult = k == 4 ? 240 : -504;
  std::vector<mpq_class> c(static_cast<size_t>(T) + 1);
  c[0] = 1;
  for (int n = 1; n <= T; ++n) {
    mpz_class s = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) {
        mpz_class pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(k - 1));
        s += pw;
      }
    c[static_cast<size_t>(n)] = mpq_class(s * mult);
  }
  // sigma_{k-1}(n) <= zeta(k-1) n^{k-1} <= zeta(k-1) T^{k-1} e^{-(k-1)} e^{(k-1) n / T}
  const double e = k - 1;
  const double zeta = k == 4 ? 1.2021 : 1.0370;
  double logk = std::log(std::abs(static_cast<double>(mult)) * zeta) + e * std::log(T) - e;
  Mag K = Mag::from_real_upper(exp(Real::from_double(logk * (1 + 1e-12) + 1e-9, 64)));
  Mag R = Mag::from_real_upper(exp(Real::from_double(e / T * (1 + 1e-12), 64)));
  return QSeries(0, std::move(c), K, R);
}

std::pair<PrecComplex, PrecComplex> lattice_invariants(const Lattice2& L) {
  const Prec p = L.w1.prec();
  auto [tr, g] = reduce_to_fundamental_domain(L.w2 / L.w1);
  (void)tr;
  PrecComplex w1 = L.w2 * g.c + L.w1 * g.d, w2 = L.w2 * g.a + L.w1 * g.b;
  PrecComplex q = qexp(w2 / w1);
  int T = terms_for(q.abs_upper(), static_cast<long>(p) + 40);
  PrecComplex e4 = eval_qseries_at_q(eisenstein_series(4, T), q);
  PrecComplex e6 = eval_qseries_at_q(eisenstein_series(6, T), q);
  PrecComplex f = PrecComplex::pi(p) * 2 / w1;
  PrecComplex f2 = f * f;
  return {f2 * f2 * e4, f2 * f2 * f2 * e6};
}

PrecComplex wp(const Lattice2& L, const PrecComplex& z) {
  const Prec p = z.prec();
  Normalized n = normalize(L, z);
  PrecComplex two_pi_i = PrecComplex::i_pi(p) * 2;
  PrecComplex one = PrecComplex::exact(1, 0, p);
  PrecComplex u = exp(two_pi_i * n.zp), ui = one / u;
  PrecComplex s = PrecComplex::rational(mpq_class(1, 12), 0, p);
  PrecComplex d0 = one - u;
  s += u / (d0 * d0);
  const Mag qa = n.q.abs_upper();
  const int M = terms_for(qa, static_cast<long>(p));
  PrecComplex qm = one;
  for (int m = 1; m <= M; ++m) {
    qm *= n.q;
    PrecComplex a = qm * u, b = qm * ui;
    PrecComplex da = one - a, db = one - b, dq = one - qm;
    s += a / (da * da) + b / (db * db) - qm * 2 / (dq * dq);
  }
  // tail: 16 |q|^{M + 1/2} / (1 - |q|)
  Mag tail = qa.pow_upper(M).mul_2si(4) * qa.sqrt_upper();
  tail = tail.div_upper(Mag(1.0).sub_to_lower(qa));
  s.add_err(tail);
  PrecComplex f = two_pi_i / n.w1;
  return f * f * s;
}

PrecComplex wp_prime(const Lattice2& L, const PrecComplex& z) {
  const Prec p = z.prec();
  Normalized n = normalize(L, z);
  PrecComplex two_pi_i = PrecComplex::i_pi(p) * 2;
  PrecComplex one = PrecComplex::exact(1, 0, p);
  PrecComplex u = exp(two_pi_i * n.zp), ui = one / u;
  auto term = [&](const PrecComplex& w) {
    PrecComplex d = one - w;
    return w * (one + w) / (d * d * d);
  };
  PrecComplex s = term(u);
  const Mag qa = n.q.abs_upper();
  const int M = terms_for(qa, static_cast<long>(p));
  PrecComplex qm = one;
  for (int m = 1; m <= M; ++m) {
    qm *= n.q;
    s += term(qm * u) - term(qm * ui);
  }
  Mag tail = qa.pow_upper(M) * Mag(24.0) * qa.sqrt_upper();
  tail = tail.div_upper(Mag(1.0).sub_to_lower(qa));
  s.add_err(tail);
  PrecComplex f = two_pi_i / n.w1;
  return f * f * f * s;
}

ComplexPoint weierstrass_point(const CurveQ& E, const Lattice2& L, const PrecComplex& z) {
  const Prec p = z.prec();
  if (L.lattice_distance(z) < std::ldexp(1.0, -static_cast<int>(p) / 2)) return {};
  PrecComplex X = wp(L, z), Y = wp_prime(L, z);
  ComplexPoint P;
  P.inf = false;
  P.x = X - PrecComplex::rational(E.b2() / 12, 0, p);
  P.y = (Y - P.x * PrecComplex::rational(E.a1(), 0, p) - PrecComplex::rational(E.a3(), 0, p)) / 2;
  return P;
}

PrecComplex elliptic_log(const CurveQ& E, const Lattice2& L, const Point& P) {
  const Prec p = L.w1.prec();
  if (P.inf) return PrecComplex::exact(0, 0, p);
  if (!on_curve(E, P)) throw InvalidInput("point not on curve");
  ComplexPoint C;
  C.inf = false;
  C.x = PrecComplex::rational(P.x, 0, p);
  C.y = PrecComplex::rational(P.y, 0, p);
  return elliptic_log(E, L, C);
}

PrecComplex elliptic_log(const CurveQ& E, const Lattice2& L, const ComplexPoint& P) {
  const Prec p = L.w1.prec();
  if (P.inf) return PrecComplex::exact(0, 0, p);
  PrecComplex X = P.x.with_prec(p) + PrecComplex::rational(E.b2() / 12, 0, p);
  PrecComplex Y = P.y.with_prec(p) * 2 + P.x.with_prec(p) * PrecComplex::rational(E.a1(), 0, p) +
                  PrecComplex::rational(E.a3(), 0, p);

  // two-torsion: a half period
  double scale = 1 + X.abs_upper().to_double();
  if (Y.abs_upper().to_double() < scale * std::ldexp(1.0, -static_cast<int>(p) / 2)) {
    PrecComplex best;
    double bd = 1e300;
    for (const PrecComplex& h : {L.w1 / 2, L.w2 / 2, (L.w1 + L.w2) / 2}) {
      double d = abs((wp(L, h) - X).mid()).to_double();
      if (d < bd) {
        bd = d;
        best = h;
      }
    }
    return L.reduce(best);
  }

  // coarse grid plus the pole expansion z ~ X^{-1/2} as starting points, then
  // Newton at low precision from the best ones, then with increasing precision
  const Prec lp = 64;
  Lattice2 low{L.w1.with_prec(lp), L.w2.with_prec(lp)};
  Complex Xl = X.mid().with_prec(lp), Yl = Y.mid().with_prec(lp);
  auto miss = [&](const Complex& z) { return abs(wp(low, exact_mid(z)).mid() - Xl).to_double(); };
  std::vector<std::pair<double, Complex>> starts;
  const int G = 12;
  for (int i = 0; i < G; ++i)
    for (int k = 0; k < G; ++k) {
      Real s = Real::from_double((i + 0.5) / G, lp), t = Real::from_double((k + 0.5) / G, lp);
      Complex z = low.w1.mid() * s + low.w2.mid() * t;
      starts.emplace_back(miss(z), z);
    }
  if (abs(Xl).to_double() > 1) {
    Complex z = Complex(Real(1, lp), Real(0, lp)) / sqrt(Xl);
    if (L.lattice_distance(exact_mid(z.with_prec(p))) < 0.25) starts.emplace_back(-1.0, z);
  }
  std::sort(starts.begin(), starts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto newton = [&](Complex z, Prec wpn, const Lattice2& lat, const Complex& Xt, int iters) {
    for (int it = 0; it < iters; ++it) {
      PrecComplex zb = exact_mid(z.with_prec(wpn));
      Complex f = wp(lat, zb).mid() - Xt;
      Complex df = wp_prime(lat, zb).mid();
      if (df.is_zero()) break;
      z = z.with_prec(wpn) - f / df;
    }
    return z;
  };
  Complex z0(lp);
  const double xs = 1 + abs(Xl).to_double();
  for (size_t c = 0; c < starts.size() && c < 6; ++c) {
    z0 = newton(starts[c].second, lp, low, Xl, 40);
    if (miss(z0) < 1e-12 * xs) break;
  }
  if (abs(wp_prime(low, exact_mid(z0)).mid() + Yl) < abs(wp_prime(low, exact_mid(z0)).mid() - Yl))
    z0 = -z0;
  Prec cur = lp;
  while (cur < p) {
    cur = std::min<Prec>(2 * cur, p);
    Lattice2 lat{L.w1.with_prec(cur), L.w2.with_prec(cur)};
    z0 = newton(z0, cur, lat, X.mid().with_prec(cur), 2);
  }
  z0 = newton(z0, p, L, X.mid(), 2);

  PrecComplex zb = exact_mid(z0);
  PrecComplex f = wp(L, zb) - X;
  PrecComplex df = wp_prime(L, zb);
  if ((df - Y).abs_upper().to_double() > 1e-6 * (1 + Y.abs_upper().to_double()))
    throw Indeterminate("elliptic logarithm did not converge");
  Mag err = (f.abs_upper() + X.err()).div_upper(df.abs_lower()).mul_2si(1) +
            Mag::from_abs_upper(z0).mul_2si(4 - static_cast<long>(p));
  return L.reduce(PrecComplex(z0, err));
}

}  // namespace cmrel

namespace cmrel {

std::pair<Real, Mag> archimedean_local_height(const Lattice2& L, const PrecComplex& z) {
  const Prec p = z.prec();
  Normalized n = normalize(L, z);
  PrecComplex zp = n.zp;
  if (zp.im().sign() < 0) zp = -zp;  // the function is even
  PrecComplex one = PrecComplex::exact(1, 0, p);
  PrecComplex two_pi_i = PrecComplex::i_pi(p) * 2;
  PrecComplex t = PrecComplex(Complex(zp.im(), Real(0, p)), zp.err()) /
                  PrecComplex(Complex(n.tau.im(), Real(0, p)), n.tau.err());
  PrecComplex b2 = t * t - t + PrecComplex::rational(mpq_class(1, 6), 0, p);
  // log|q| = -2 pi Im(tau)
  PrecComplex logq = PrecComplex::pi(p) * PrecComplex(Complex(n.tau.im(), Real(0, p)), n.tau.err()) * -2;
  PrecComplex u = exp(two_pi_i * zp), ui = one / u;
  PrecComplex acc = -(b2 * logq) / 2 - log(one - u);
  const Mag qa = n.q.abs_upper();
  const int M = terms_for(qa, static_cast<long>(p));
  PrecComplex qm = one;
  for (int m = 1; m <= M; ++m) {
    qm *= n.q;
    acc -= log(one - qm * u) + log(one - qm * ui);
  }
  // |log|1 - w|| <= 2|w| for |w| <= 1/2; |q^m u|, |q^m / u| <= |q|^{m - 1/2}
  Mag tail = qa.pow_upper(M).mul_2si(2) * qa.sqrt_upper();
  tail = tail.div_upper(Mag(1.0).sub_to_lower(qa));
  Mag err = acc.err() + tail;
  return {acc.re(), err};
}

}  // namespace cmrel
