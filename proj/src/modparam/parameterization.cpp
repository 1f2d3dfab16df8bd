#include "cmrel/modparam/parameterization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmrel/error.hpp"
#include "cmrel/modular/modpoly.hpp"
#include "cmrel/numerics/algebraic.hpp"

namespace cmrel {

namespace {

PrecComplex fricke(const PrecComplex& tau, long N) {
  return -(PrecComplex::exact(1, 0, tau.prec()) / (tau * N));
}

double im_of(const PrecComplex& t) { return t.im().to_double(); }

// sum_{n <= T} a_n / n q^n by Horner with the tail |a_n / n| <= 2.
PrecComplex series(const CurveQ& M, const PrecComplex& tau, Prec p) {
  if (!tau.im_positive()) throw InvalidInput("not in upper half plane");
  PrecComplex q = qexp(tau.with_prec(p));
  const Mag qa = q.abs_upper();
  const double lq = std::log2(qa.to_double());
  const double lgap = -std::log2(1 - qa.to_double());
  const long T = std::max<long>(8, static_cast<long>(std::ceil((p + 12 + lgap) / -lq)));
  auto f = an_coefficients(M, T);
  PrecComplex acc(p);
  for (long n = T; n >= 1; --n) {
    long a = f->a[static_cast<size_t>(n)];
    if (a != 0) acc += PrecComplex(Complex(Real(a, p) / n, Real(0, p)), ulp_rel(p, 1));
    acc *= q;
  }
  Mag tail = qa.pow_upper(T + 1).mul_2si(1).div_upper(Mag(1.0).sub_to_lower(qa));
  acc.add_err(tail);
  return acc;
}

mpz_class ext_inverse(long a, long m) {
  mpz_class r;
  mpz_class am(a), mm(m);
  if (mpz_invert(r.get_mpz_t(), am.get_mpz_t(), mm.get_mpz_t()) == 0)
    throw InternalError("no inverse");
  return r;
}

}  // namespace

PrecComplex newform_integral(const ParamMap& pm, const PrecComplex& tau) {
  return series(pm.mm.curve, tau, pm.prec);
}

namespace {

// Exact (not reduced) value of the integral from i oo to tau, using one Fricke
// step when it enlarges Im(tau).
PrecComplex phi_exact(const ParamMap& pm, const PrecComplex& tau) {
  PrecComplex w = fricke(tau, pm.N);
  if (im_of(w) > im_of(tau)) return pm.phi_zero + series(pm.mm.curve, w, pm.prec) * pm.fricke_sign;
  return series(pm.mm.curve, tau, pm.prec);
}

PrecComplex scale(const ParamMap& pm, const PrecComplex& v) {
  return v * PrecComplex::rational(pm.lambda, 0, v.prec());
}

}  // namespace

ParamMap make_param_map(const CurveQ& E, Prec prec) {
  ParamMap pm(E, minimal_model(E));
  pm.N = conductor(pm.mm.curve).get_si();
  pm.prec = prec;
  pm.lattice = periods(pm.mm.curve, prec);
  const long N = pm.N;
  const Real rn = sqrt(Real(N, prec));
  auto pt = [&](double x, double y) {
    return PrecComplex(Complex(Real::from_double(x, prec) / rn, Real::from_double(y, prec) / rn), Mag());
  };

  // Fricke sign from phi(0) = phi(w tau) - eps phi(tau) at two points
  PrecComplex t1 = pt(0.1, 1.0), t2 = pt(-0.2, 0.8);
  PrecComplex s1 = series(pm.mm.curve, t1, prec), s2 = series(pm.mm.curve, t2, prec);
  PrecComplex w1 = series(pm.mm.curve, fricke(t1, N), prec), w2 = series(pm.mm.curve, fricke(t2, N), prec);
  PrecComplex eps = (w1 - w2) / (s1 - s2);
  const double er = eps.re().to_double();
  if (std::abs(std::abs(er) - 1) > 1e-8 || std::abs(eps.im().to_double()) > 1e-8)
    throw InternalError("Fricke eigenvalue is not +-1");
  pm.fricke_sign = er > 0 ? 1 : -1;
  pm.phi_zero = w1 - s1 * pm.fricke_sign;

  // newform periods phi(g tau) - phi(tau) for g = [[a, b], [N c, d]] with
  // tau = (-d + i) / (N c), g tau = (a + i) / (N c)
  std::vector<std::pair<Real, Real>> coords;
  auto add_periods = [&](long c) {
    const long Nc = N * c;
    for (long d = -12; d <= 12; ++d) {
      if (std::gcd(d, Nc) != 1) continue;
      long a = ext_inverse(((d % Nc) + Nc) % Nc, Nc).get_si();
      if (2 * a > Nc) a -= Nc;
      PrecComplex tau(Complex(Real(-d, prec) / Nc, Real(1, prec) / Nc), Mag());
      PrecComplex gtau(Complex(Real(a, prec) / Nc, Real(1, prec) / Nc), Mag());
      PrecComplex per = phi_exact(pm, gtau) - phi_exact(pm, tau);
      coords.push_back(pm.lattice.coordinates(per));
    }
  };
  auto rank2 = [&]() {
    for (size_t i = 0; i < coords.size(); ++i)
      for (size_t j = i + 1; j < coords.size(); ++j) {
        Real det = coords[i].first * coords[j].second - coords[i].second * coords[j].first;
        if (std::abs(det.to_double()) > 1e-6) return true;
      }
    return false;
  };
  add_periods(1);
  if (!rank2()) add_periods(2);
  if (!rank2()) throw InternalError("newform periods do not span a lattice");

  const double tol = std::ldexp(1.0, -static_cast<int>(prec) / 4);
  std::vector<mpq_class> cands;
  for (long u = 1; u <= 12; ++u)
    for (long v = 1; v <= 12; ++v)
      if (std::gcd(u, v) == 1) cands.emplace_back(u, v);
  std::sort(cands.begin(), cands.end());
  for (const auto& lam : cands) {
    Real l(lam, prec);
    bool ok = true;
    for (const auto& [s, t] : coords) {
      for (const Real* x : {&s, &t}) {
        Real v = *x * l;
        Real dv = abs(v - Real(v.round(), prec));
        if (dv.to_double() > tol * (1 + std::abs(v.to_double()))) ok = false;
      }
      if (!ok) break;
    }
    if (ok) {
      pm.lambda = lam;
      return pm;
    }
  }
  throw InternalError("no lattice-matching scalar with numerator and denominator at most 12");
}

ComplexPoint to_caller_model(const ParamMap& pm, const ComplexPoint& P) {
  if (P.inf) return P;
  const Iso& is = pm.mm.iso;
  const Prec p = P.x.prec();
  auto R = [p](const mpq_class& q) { return PrecComplex::rational(q, 0, p); };
  ComplexPoint out;
  out.inf = false;
  mpq_class u2 = is.u * is.u;
  out.x = P.x * R(u2) + R(is.r);
  out.y = P.y * R(u2 * is.u) + P.x * R(is.s * u2) + R(is.t);
  return out;
}

ComplexPoint to_minimal_model(const ParamMap& pm, const ComplexPoint& P) {
  if (P.inf) return P;
  const Iso& is = pm.mm.iso;
  const Prec p = P.x.prec();
  auto R = [p](const mpq_class& q) { return PrecComplex::rational(q, 0, p); };
  ComplexPoint out;
  out.inf = false;
  mpq_class u2 = is.u * is.u;
  out.x = (P.x - R(is.r)) / R(u2);
  out.y = (P.y - out.x * R(is.s * u2) - R(is.t)) / R(u2 * is.u);
  return out;
}

namespace {

PhiValue finish(const ParamMap& pm, const PrecComplex& raw) {
  PhiValue v;
  v.z = pm.lattice.reduce(scale(pm, raw));
  v.point = to_caller_model(pm, weierstrass_point(pm.mm.curve, pm.lattice, v.z));
  return v;
}

}  // namespace

PhiValue phi_eval(const ParamMap& pm, const PrecComplex& tau_in) {
  if (!tau_in.im_positive()) throw InvalidInput("not in upper half plane");
  PrecComplex tau = tau_in.with_prec(pm.prec);
  // phi(orig) = sign * phi(tau) + zeros * phi(0) modulo periods
  int sign = 1;
  long zeros = 0;
  for (int round = 0; round < 64; ++round) {
    bool moved = false;
    const double x = tau.re().to_double(), y = im_of(tau);
    double best = 1.0 - 1e-9;
    long bc = 0, bd = 0;
    for (long k = 1; static_cast<double>(pm.N * k) * y < 1.0 && k < 1000000; ++k) {
      const long c = pm.N * k;
      const long d0 = std::lround(-static_cast<double>(c) * x);
      for (long d = d0 - 1; d <= d0 + 1; ++d) {
        if (std::gcd(c, d) != 1) continue;
        double v = (c * x + d) * (c * x + d) + (c * y) * (c * y);
        if (v < best) {
          best = v;
          bc = c;
          bd = d;
        }
      }
    }
    if (bc != 0) {
      long a = ext_inverse(((bd % bc) + bc) % bc, bc).get_si();
      long b = (a * bd - 1) / bc;
      tau = MobiusMap{a, b, bc, bd}.apply(tau);
      moved = true;
    }
    mpz_class sh = tau.re().round();
    if (sh != 0) tau -= PrecComplex::rational(sh, 0, tau.prec());
    PrecComplex w = fricke(tau, pm.N);
    if (im_of(w) > im_of(tau) * (1 + 1e-9)) {
      // phi(tau) = phi(0) + eps phi(w tau)
      zeros += sign;
      sign *= pm.fricke_sign;
      tau = w;
      moved = true;
    }
    if (!moved) break;
  }
  PrecComplex raw = series(pm.mm.curve, tau, pm.prec) * sign;
  if (zeros != 0) raw += pm.phi_zero * zeros;
  return finish(pm, raw);
}

PhiValue phi_eval_cusp(const ParamMap& pm, const std::optional<mpq_class>& cusp) {
  if (!cusp) return finish(pm, PrecComplex::exact(0, 0, pm.prec));
  const mpz_class& c = cusp->get_den();
  if (c % pm.N == 0) return finish(pm, PrecComplex::exact(0, 0, pm.prec));
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), mpz_class(pm.N).get_mpz_t());
  if (g == 1) return finish(pm, pm.phi_zero);
  throw InvalidInput("unsupported cusp");
}

long torsion_order_of(const Lattice2& L, const PrecComplex& z, long max_order) {
  const double tol = std::ldexp(1.0, -static_cast<int>(z.prec()) / 3);
  for (long k = 1; k <= max_order; ++k)
    if (L.lattice_distance(z * k) < tol) return k;
  return 0;
}

std::optional<Point> recognize_rational_point(const CurveQ& E, const ComplexPoint& P,
                                              const mpz_class& height_bound, Prec prec) {
  if (P.inf) return Point::infinity();
  auto x = recognize_rational(P.x, height_bound, prec);
  if (!x) return std::nullopt;
  mpq_class b = E.a1() * *x + E.a3();
  mpq_class f = ((*x + E.a2()) * *x + E.a4()) * *x + E.a6();
  mpq_class disc = b * b + 4 * f;
  if (disc < 0 || !mpz_perfect_square_p(disc.get_num().get_mpz_t()) ||
      !mpz_perfect_square_p(disc.get_den().get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), disc.get_num().get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), disc.get_den().get_mpz_t());
  mpq_class r(rn, rd);
  r.canonicalize();
  Point c1 = Point::affine(*x, (-b + r) / 2), c2 = Point::affine(*x, (-b - r) / 2);
  auto miss = [&](const Point& c) {
    return abs((P.y - PrecComplex::rational(c.y, 0, P.y.prec())).mid()).to_double();
  };
  Point best = miss(c1) <= miss(c2) ? c1 : c2;
  if (miss(best) > std::ldexp(1.0, -static_cast<int>(prec) / 4) * (1 + std::abs(best.y.get_d())))
    return std::nullopt;
  return best;
}

HeegnerResult heegner_point(const ParamMap& pm, const Disc& d) {
  auto forms = heegner_forms(d, pm.N);
  if (forms.empty()) throw InvalidInput("Heegner hypothesis fails");
  HeegnerResult r;
  r.disc = d.value();
  r.class_number = class_number(d);
  const Prec p = pm.prec;
  const mpz_class hb = mpz_class(1) << static_cast<unsigned long>(std::max<long>(16, p / 8));
  PrecComplex acc = PrecComplex::exact(0, 0, p);
  for (const auto& f : forms) {
    HeegnerEntry e;
    e.tau = TauPoint(f);
    PhiValue v = phi_eval(pm, e.tau.value(p));
    e.z = v.z;
    e.point = v.point;
    if (v.point.inf) {
      e.rational = Point::infinity();
    } else {
      e.x_minpoly = recognize_algebraic(v.point.x, static_cast<int>(r.class_number), hb, p);
      if (e.x_minpoly && e.x_minpoly->degree() == 1) e.rational = recognize_rational_point(pm.curve, v.point, hb, p);
    }
    acc += v.z;
    r.points.push_back(std::move(e));
  }
  r.trace_z = pm.lattice.reduce(acc);
  r.trace = to_caller_model(pm, weierstrass_point(pm.mm.curve, pm.lattice, r.trace_z));
  r.trace_rational = recognize_rational_point(pm.curve, r.trace, hb, p);
  return r;
}

std::vector<VImage> v_images(const CorrespondenceSpec& cs, const PrecComplex& tau) {
  if (!cs.pm) throw InvalidInput("missing parameterization");
  if (cs.M < 1 || cs.M > kMaxModPolyLevel) throw InvalidInput("level out of supported range");
  std::vector<VImage> out;
  if (cs.M == 1) {
    out.push_back({tau, phi_eval(*cs.pm, tau)});
    return out;
  }
  for (const auto& g : cyclic_isogeny_reps(cs.M)) {
    PrecComplex t = g.apply(tau.with_prec(cs.pm->prec));
    out.push_back({t, phi_eval(*cs.pm, t)});
  }
  return out;
}

std::vector<VImage> v_images(const CorrespondenceSpec& cs, const TauPoint& s) {
  if (!cs.pm) throw InvalidInput("missing parameterization");
  return v_images(cs, s.value(cs.pm->prec));
}

}  // namespace cmrel
