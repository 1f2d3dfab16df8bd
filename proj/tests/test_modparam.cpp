#include <cmath>
#include <numeric>
#include <random>

#include "cmrel/elliptic/height.hpp"
#include "cmrel/elliptic/tate.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modparam/newform.hpp"
#include "cmrel/modparam/parameterization.hpp"
#include "cmrel/modular/isogeny.hpp"
#include "cmrel/modular/jfunction.hpp"
#include "cmrel/numerics/factor.hpp"
#include "doctest.h"

using namespace cmrel;

namespace {

const CurveQ E11 = CurveQ::from_longs(0, -1, 1, -10, -20);
const CurveQ E37 = CurveQ::from_longs(0, 0, 1, -1, 0);
const CurveQ E14 = CurveQ::from_longs(1, 0, 1, 4, -6);

const ParamMap& pm11() {
  static const ParamMap pm = make_param_map(E11, 192);
  return pm;
}
const ParamMap& pm37() {
  static const ParamMap pm = make_param_map(E37, 256);
  return pm;
}

// F_4 = F_2[w] / (w^2 + w + 1), elements as 2-bit masks (bit 1 is w).
int f4_mul(int a, int b) {
  int r = 0;
  for (int i = 0; i < 2; ++i)
    if (b >> i & 1) r ^= a << i;
  if (r & 4) r ^= 7;  // w^2 = w + 1
  return r;
}

long count_f4(const CurveQ& E) {
  auto md = [](const mpq_class& q) { return static_cast<int>(((q.get_num() % 2) + 2) % 2 == 0 ? 0 : 1); };
  const int a1 = md(E.a1()), a2 = md(E.a2()), a3 = md(E.a3()), a4 = md(E.a4()), a6 = md(E.a6());
  long n = 1;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      int x2 = f4_mul(x, x), x3 = f4_mul(x2, x);
      int l = f4_mul(y, y) ^ f4_mul(a1, f4_mul(x, y)) ^ f4_mul(a3, y);
      int r = x3 ^ f4_mul(a2, x2) ^ f4_mul(a4, x) ^ a6;
      if (l == r) ++n;
    }
  return n;
}

double zdist(const Lattice2& L, const PrecComplex& a, const PrecComplex& b) { return L.lattice_distance(a - b); }

PrecComplex curve_residual(const CurveQ& E, const ComplexPoint& P) {
  const Prec p = P.x.prec();
  auto R = [p](const mpq_class& q) { return PrecComplex::rational(q, 0, p); };
  const PrecComplex &x = P.x, &y = P.y;
  return y * y + R(E.a1()) * x * y + R(E.a3()) * y - x * x * x - R(E.a2()) * x * x - R(E.a4()) * x - R(E.a6());
}

}  // namespace

TEST_CASE("newform coefficients") {
  auto f = an_coefficients(E37, 200);
  CHECK(f->N == 37);
  CHECK(f->an(1) == 1);
  CHECK(f->an(2) == -2);
  CHECK(f->an(4) == 2);
  CHECK(f->an(4) == f->an(2) * f->an(2) - 2);
  // a_4 = t_4 + 2 where t_4 is the Frobenius trace over F_4
  CHECK(f->an(4) == (4 + 1 - count_f4(E37)) + 2);
  CHECK(f->an(6) == f->an(2) * f->an(3));
  CHECK_THROWS_AS(f->an(100000), InvalidInput);
  auto g = an_coefficients(E11, 20);
  const long known[] = {1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4, 4, -1, -4, -2, 4, 0, 2};
  for (int n = 1; n <= 20; ++n) CHECK(g->an(n) == known[n - 1]);
}

TEST_CASE("newform recursion and multiplicativity") {
  for (const CurveQ& E : {E11, E37, E14, CurveQ::from_longs(0, 1, 1, -2, 0)}) {
    auto f = an_coefficients(E, 300);
    const long N = f->N;
    for (long m = 1; m <= 100; ++m)
      for (long n = 1; n <= 100 && m * n <= 300; ++n)
        if (std::gcd(m, n) == 1) CHECK(f->an(m * n) == f->an(m) * f->an(n));
    for (long p : primes_up_to(17)) {
      CHECK(f->an(p) == ap(E, p));
      for (long pk = p; pk * p * p <= 300; pk *= p) {
        if (N % p == 0)
          CHECK(f->an(pk * p) == f->an(p) * f->an(pk));
        else
          CHECK(f->an(pk * p * p) == f->an(p) * f->an(pk * p) - p * f->an(pk));
      }
    }
  }
}

TEST_CASE("parameterization at the cusps") {
  const ParamMap& pm = pm11();
  CHECK(pm.N == 11);
  CHECK(pm.lambda == 1);
  PhiValue inf = phi_eval_cusp(pm, std::nullopt);
  CHECK(inf.point.inf);
  CHECK(inf.z.mid().is_zero());
  PhiValue zero = phi_eval_cusp(pm, mpq_class(0));
  CHECK(!zero.point.inf);
  CHECK(torsion_order_of(pm.lattice, zero.z) == 5);
  CHECK(pm.lattice.lattice_distance(zero.z * 5) < 1e-40);
  CHECK(pm.lattice.lattice_distance(zero.z) > 0.1);
  // the image is a rational 5-torsion point
  auto P = recognize_rational_point(E11, zero.point, 1000, pm.prec);
  REQUIRE(P.has_value());
  CHECK(point_mul(E11, *P, 5).inf);
  CHECK(!P->inf);
  // cusps equivalent to 0 and to i oo
  CHECK(zdist(pm.lattice, phi_eval_cusp(pm, mpq_class(1, 3)).z, zero.z) < 1e-40);
  CHECK(phi_eval_cusp(pm, mpq_class(2, 11)).point.inf);
  ParamMap pm14 = make_param_map(E14, 128);
  CHECK_THROWS_WITH_AS(phi_eval_cusp(pm14, mpq_class(1, 2)), "unsupported cusp", InvalidInput);
}

TEST_CASE("parameterization is Gamma_0(N)-invariant") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.05, 0.4);
  const ParamMap& pm = pm37();
  const long N = pm.N;
  for (int i = 0; i < 8; ++i) {
    PrecComplex tau(Complex::from_double(re(rng), im(rng), pm.prec));
    long c = N * (1 + static_cast<long>(rng() % 2));
    long d = 1 + static_cast<long>(rng() % 6);
    while (std::gcd(c, d) != 1) ++d;
    mpz_class a;
    mpz_invert(a.get_mpz_t(), mpz_class(d).get_mpz_t(), mpz_class(c).get_mpz_t());
    long al = a.get_si(), b = (al * d - 1) / c;
    MobiusMap g{al, b, c, d};
    REQUIRE(g.det() == 1);
    PhiValue v1 = phi_eval(pm, tau), v2 = phi_eval(pm, g.apply(tau));
    CHECK(zdist(pm.lattice, v1.z, v2.z) < 1e-50);
  }
}

TEST_CASE("newform integral tail matches a doubled truncation") {
  const ParamMap& pm = pm37();
  const Prec p = pm.prec;
  for (double y : {0.3, 0.08}) {
    PrecComplex tau(Complex::from_double(0.17, y, p));
    PrecComplex s = newform_integral(pm, tau);
    // plain partial sum with twice the terms the tail analysis asks for
    Complex q = qexp(tau).mid();
    const double lq = std::log2(q.re.to_double() * q.re.to_double() + q.im.to_double() * q.im.to_double()) / 2;
    long T = 2 * static_cast<long>(std::ceil((p + 20) / -lq));
    auto f = an_coefficients(E37, T);
    Complex acc(p), qn(Real(1, p), Real(0, p));
    for (long n = 1; n <= T; ++n) {
      qn *= q;
      acc += qn * (Real(f->an(n), p) / n);
    }
    CHECK(abs(acc - s.mid()).to_double() <= s.err().to_double() + 1e-60);
    CHECK(s.err().to_double() < 1e-60);
  }
}

TEST_CASE("Heegner points") {
  const ParamMap& pm = pm37();
  HeegnerResult h = heegner_point(pm, Disc(-7));
  REQUIRE(h.points.size() == 1);
  CHECK(h.class_number == 1);
  const HeegnerEntry& e = h.points[0];
  REQUIRE(e.rational.has_value());
  CHECK(on_curve(E37, *e.rational));
  CHECK(!e.rational->inf);
  Point P0 = Point::affine(0, 0);
  CHECK((*e.rational == P0 || *e.rational == point_neg(E37, P0)));
  CHECK(std::abs(canonical_height(E37, *e.rational).to_double() - canonical_height(E37, P0).to_double()) < 1e-12);
  REQUIRE(h.trace_rational.has_value());
  CHECK(*h.trace_rational == *e.rational);

  CHECK_THROWS_WITH_AS(heegner_point(pm11(), Disc(-3)), "Heegner hypothesis fails", InvalidInput);
}

TEST_CASE("Heegner points lie on the curve and respect the degree bound") {
  const ParamMap& pm = pm37();
  int recognized = 0, tried = 0;
  for (long D = -3; D >= -200; --D) {
    if (!(D % 4 == 0 || (D % 4 + 4) % 4 == 1)) continue;
    Disc d(D);
    if (heegner_forms(d, 37).empty()) continue;
    if (class_number(d) > 4) continue;
    HeegnerResult h = heegner_point(pm, d);
    ++tried;
    CHECK(static_cast<long>(h.points.size()) == h.class_number);
    for (const auto& e : h.points) {
      if (e.point.inf) continue;
      double scale = 1 + std::pow(e.point.x.abs_upper().to_double(), 3);
      CHECK(curve_residual(E37, e.point).abs_upper().to_double() < 1e-50 * scale);
      if (e.x_minpoly) {
        ++recognized;
        CHECK(e.x_minpoly->degree() <= h.class_number);
      }
    }
  }
  CHECK(tried >= 5);
  CHECK(recognized >= 5);
}

TEST_CASE("V-images") {
  auto pm = std::make_shared<const ParamMap>(pm37());
  TauPoint s = reduced_point(TauPoint(QuadForm{1, 1, 2}));
  CorrespondenceSpec one{pm, 1};
  auto v1 = v_images(one, s);
  REQUIRE(v1.size() == 1);
  CHECK(zdist(pm->lattice, v1[0].value.z, phi_eval(*pm, s.value(pm->prec)).z) < 1e-60);

  CorrespondenceSpec two{pm, 2};
  auto v2 = v_images(two, s);
  REQUIRE(v2.size() == 3);
  auto nb = hecke_neighbors(j_invariant(s, 256), 2, 256);
  REQUIRE(nb.size() == 3);
  std::vector<bool> used(3, false);
  for (const auto& v : v2) {
    PrecComplex j = j_invariant(v.tau, 256);
    bool hit = false;
    for (size_t i = 0; i < 3 && !hit; ++i)
      if (!used[i] && abs((nb[i] - j).mid()).to_double() < 1e-30 * (1 + j.abs_upper().to_double())) {
        used[i] = true;
        hit = true;
      }
    CHECK(hit);
  }
  CHECK_THROWS_AS(v_images(CorrespondenceSpec{pm, 0}, s), InvalidInput);
}
