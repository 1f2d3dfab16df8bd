#include <algorithm>
#include <cmath>
#include <random>

#include "cmrel/elliptic/analytic.hpp"
#include "cmrel/elliptic/curve.hpp"
#include "cmrel/elliptic/endomorphism.hpp"
#include "cmrel/elliptic/height.hpp"
#include "cmrel/elliptic/tate.hpp"
#include "cmrel/elliptic/torsion.hpp"
#include "cmrel/error.hpp"
#include "cmrel/numerics/factor.hpp"
#include "cmrel/quadforms/quadforms.hpp"
#include "doctest.h"

using namespace cmrel;

namespace {

const CurveQ E11 = CurveQ::from_longs(0, -1, 1, -10, -20);
const CurveQ E37 = CurveQ::from_longs(0, 0, 1, -1, 0);
const CurveQ E389 = CurveQ::from_longs(0, 1, 1, -2, 0);
const CurveQ E5077 = CurveQ::from_longs(0, 0, 1, -7, 6);
const CurveQ Econg = CurveQ::from_longs(0, 0, 0, -1, 0);

// Projective points of the given model over F_p by brute force.
long naive_count(const CurveQ& E, long p) {
  auto md = [p](const mpq_class& q) {
    mpz_class d = q.get_den(), inv;
    mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), mpz_class(p).get_mpz_t());
    mpz_class r = q.get_num() * inv % p;
    return (r.get_si() + p) % p;
  };
  const long a1 = md(E.a1()), a2 = md(E.a2()), a3 = md(E.a3()), a4 = md(E.a4()), a6 = md(E.a6());
  long n = 1;
  for (long x = 0; x < p; ++x)
    for (long y = 0; y < p; ++y) {
      long l = (y * y + a1 * x * y + a3 * y) % p;
      long r = (((x * x + a2 * x + a4) % p) * x + a6) % p;
      if ((l - r) % p == 0) ++n;
    }
  return n;
}

// Tangent-line duplication written out independently of the group law.
Point double_by_tangent(const CurveQ& E, const Point& P) {
  mpq_class num = 3 * P.x * P.x + 2 * E.a2() * P.x + E.a4() - E.a1() * P.y;
  mpq_class den = 2 * P.y + E.a1() * P.x + E.a3();
  mpq_class l = num / den;
  mpq_class x3 = l * l + E.a1() * l - E.a2() - 2 * P.x;
  mpq_class y3 = -(l + E.a1()) * x3 - (P.y - l * P.x) - E.a3();
  return Point::affine(x3, y3);
}

std::vector<Point> nontorsion_points(const CurveQ& E, long bound) {
  std::vector<Point> out;
  for (const Point& P : search_points(E, bound))
    if (point_order(E, P) == 0) out.push_back(P);
  return out;
}

// The real period of y^2 = x^3 - x as the integral of dx / y over [1, oo),
// rewritten (x = 1 + tan^2) as int_0^{pi/2} 2 / sqrt(1 + cos^2) by trapezoid.
double lemniscate_period_by_quadrature() {
  const int n = 400;
  const double h = M_PI / 2 / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    double c = std::cos(i * h);
    double f = 2 / std::sqrt(1 + c * c);
    s += (i == 0 || i == n) ? f / 2 : f;
  }
  return s * h;
}

double dist(const PrecComplex& a, const PrecComplex& b) { return abs((a - b).mid()).to_double(); }

}  // namespace

TEST_CASE("curve construction and parsing") {
  CHECK_THROWS_WITH_AS(CurveQ::from_longs(0, 0, 0, 0, 0), "singular curve", InvalidInput);
  CHECK_THROWS_WITH_AS(CurveQ::parse("1,2,3"), "malformed curve coefficients", InvalidInput);
  CHECK(CurveQ::parse("[0,0,1,-1,0]") == E37);
  CHECK(CurveQ::parse("0, -1, 1, -10, -20") == E11);
  CHECK(E37.disc() == 37);
  CHECK(E11.disc() == -161051);
  CHECK(E11.j() == mpq_class(-122023936, 161051));
  CHECK(CurveQ::parse("0,0,0,1/4,-1/3").a4() == mpq_class(1, 4));
}

TEST_CASE("group law examples and properties") {
  Point P = Point::affine(0, 0);
  CHECK(point_add(E37, P, point_neg(E37, P)).inf);
  CHECK(point_mul(E37, P, 0).inf);
  CHECK(point_mul(E37, P, 2) == Point::affine(1, 0));
  CHECK(point_mul(E37, P, 2) == double_by_tangent(E37, P));
  CHECK(point_mul(E37, P, 5) == Point::affine(mpq_class(1, 4), mpq_class(-5, 8)));
  Point P4 = double_by_tangent(E37, double_by_tangent(E37, P));
  CHECK(point_add(E37, P4, P) == point_mul(E37, P, 5));
  CHECK_THROWS_WITH_AS(point_add(E37, Point::affine(1, 1), P), "point not on curve", InvalidInput);

  auto pts = search_points(E389, 20);
  REQUIRE(pts.size() >= 6);
  std::mt19937 rng(3);
  for (int i = 0; i < 30; ++i) {
    const Point& a = pts[rng() % pts.size()];
    const Point& b = pts[rng() % pts.size()];
    const Point& c = pts[rng() % pts.size()];
    CHECK(point_add(E389, point_add(E389, a, b), c) == point_add(E389, a, point_add(E389, b, c)));
    CHECK(point_add(E389, a, b) == point_add(E389, b, a));
    CHECK(on_curve(E389, point_add(E389, a, b)));
  }
  Point Q = pts[0];
  CHECK(point_mul(E389, Q, 7) == point_add(E389, point_mul(E389, Q, 3), point_mul(E389, Q, 4)));
  CHECK(point_mul(E389, Q, -5) == point_neg(E389, point_mul(E389, Q, 5)));
}

TEST_CASE("minimal models and conductors") {
  CHECK(conductor(E11) == 11);
  CHECK(conductor(E37) == 37);
  CHECK(conductor(E389) == 389);
  CHECK(conductor(Econg) == 32);
  CHECK(conductor(CurveQ::from_longs(0, 0, 0, 0, -1)) == 144);
  // 37a1 scaled by u = 6
  CurveQ big = CurveQ::from_longs(0, 0, 0, -1296, 11664);
  MinimalModel mm = minimal_model(big);
  CHECK(mm.curve.c4() == E37.c4());
  CHECK(mm.curve.c6() == E37.c6());
  CHECK(mm.iso.apply(big) == mm.curve);
  Point P = Point::affine(0, 108);
  REQUIRE(on_curve(big, P));
  CHECK(on_curve(mm.curve, mm.iso.map_point(P)));
  CHECK(mm.iso.unmap_point(mm.iso.map_point(P)) == P);
  auto ld = local_data(E11);
  REQUIRE(ld.size() == 1);
  CHECK(ld[0].kodaira == "I5");
  CHECK(ld[0].tamagawa == 5);
}

TEST_CASE("trace of Frobenius examples") {
  CHECK(ap(E11, 2) == -2);
  CHECK(ap(E11, 3) == -1);
  CHECK(ap(E37, 2) == -2);
  CHECK(naive_count(E11, 2) == 5);
}

TEST_CASE("trace of Frobenius against brute-force counts and Hasse") {
  for (const CurveQ& E : {E11, E37, E389, E5077, Econg}) {
    mpz_class N = conductor(E);
    for (long p : primes_up_to(150)) {
      long a = ap(E, p);
      CHECK(static_cast<double>(a * a) <= 4.0 * p);
      if (N % p != 0) {
        CHECK(a == p + 1 - naive_count(E, p));
      } else {
        LocalData l = local_data_at(E, p);
        long expect = l.reduction == Reduction::kSplitMultiplicative      ? 1
                      : l.reduction == Reduction::kNonsplitMultiplicative ? -1
                                                                          : 0;
        CHECK(a == expect);
      }
    }
  }
  CHECK(ap(E11, 11) == 1);
  CHECK(ap(E37, 37) == -1);
}

TEST_CASE("torsion subgroup examples") {
  TorsionGroup t11 = torsion_subgroup(E11);
  CHECK(t11.invariants == std::vector<long>{5});
  CHECK(t11.order() == 5);
  CHECK(torsion_subgroup(E37).order() == 1);
  CHECK(torsion_subgroup(E37).invariants.empty());
  TorsionGroup t2 = torsion_subgroup(Econg);
  CHECK(t2.invariants == std::vector<long>{2, 2});
  std::vector<Point> two{Point::affine(0, 0), Point::affine(1, 0), Point::affine(-1, 0)};
  for (const Point& P : two) CHECK(std::find(t2.points.begin(), t2.points.end(), P) != t2.points.end());
  CHECK(torsion_subgroup(CurveQ::from_longs(0, 0, 0, 0, 1)).invariants == std::vector<long>{6});
}

TEST_CASE("torsion order divides good-reduction point counts") {
  const CurveQ curves[] = {E11, Econg, CurveQ::from_longs(0, 0, 0, 0, 1), CurveQ::from_longs(1, 0, 1, -19, 26),
                           CurveQ::from_longs(1, 0, 0, -45, 81)};
  for (const CurveQ& E : curves) {
    TorsionGroup T = torsion_subgroup(E);
    for (const Point& P : T.points) {
      CHECK(on_curve(E, P));
      CHECK(point_mul(E, P, T.order()).inf);
    }
    mpz_class N = conductor(E);
    for (long p : primes_up_to(60))
      if (p > 2 && N % p != 0) CHECK(count_points_mod_p(E, p) % T.order() == 0);
  }
}

TEST_CASE("periods of y^2 = x^3 - x") {
  Lattice2 L = periods(Econg, 128);
  double varpi = lemniscate_period_by_quadrature();
  CHECK(std::abs(L.w1.re().to_double() - varpi) < 1e-12);
  CHECK(std::abs(L.real_volume(Econg).re().to_double() - 2 * varpi) < 1e-12);
  CHECK(std::abs(L.real_volume(Econg).re().to_double() - 2 * 2.62205755429212) < 1e-12);
  // square lattice
  CHECK(dist(L.w2, PrecComplex(Complex(Real(0, 128), L.w1.re()))) < 1e-30);
}

TEST_CASE("lattice invariants round-trip to the model") {
  const CurveQ curves[] = {E11, E37, E389, Econg, CurveQ::from_longs(1, 0, 0, 0, 1),
                           CurveQ::parse("0,0,0,-3/4,1/8"), CurveQ::from_longs(0, 0, 0, 0, -1)};
  for (const CurveQ& E : curves) {
    for (Prec p : {96, 256}) {
      Lattice2 L = periods(E, p);
      CHECK(L.tau().im().sign() > 0);
      auto [c4, c6] = lattice_invariants(L);
      PrecComplex t4 = PrecComplex::rational(E.c4(), 0, p), t6 = PrecComplex::rational(E.c6(), 0, p);
      CHECK((c4 - t4).contains_zero());
      CHECK((c6 - t6).contains_zero());
      CHECK(dist(c4, t4) < std::ldexp(1.0, -static_cast<int>(p) / 2));
    }
  }
}

TEST_CASE("elliptic logarithm") {
  Lattice2 L = periods(E389, 128);
  CHECK(elliptic_log(E389, L, Point::infinity()).mid().is_zero());
  Point P = Point::affine(0, 0), Q = Point::affine(1, 0);
  PrecComplex zP = elliptic_log(E389, L, P), zQ = elliptic_log(E389, L, Q);
  CHECK(L.lattice_distance(elliptic_log(E389, L, point_mul(E389, P, 2)) - zP * 2) < 1e-30);
  CHECK(L.lattice_distance(elliptic_log(E389, L, point_add(E389, P, Q)) - zP - zQ) < 1e-30);
  CHECK(L.lattice_distance(elliptic_log(E389, L, point_neg(E389, P)) + zP) < 1e-30);
  auto [s, t] = L.coordinates(zP);
  CHECK(s.sign() >= 0);
  CHECK(s < 1);
  CHECK(t.sign() >= 0);
  CHECK(t < 1);
  CHECK_THROWS_AS(elliptic_log(E389, L, Point::affine(5, 5)), InvalidInput);

  // 2-torsion lands on a half period
  Lattice2 Lc = periods(Econg, 128);
  PrecComplex h = elliptic_log(Econg, Lc, Point::affine(1, 0));
  CHECK(Lc.lattice_distance(h * 2) < 1e-30);
  CHECK(Lc.lattice_distance(h) > 0.4);
}

TEST_CASE("Weierstrass point and elliptic log round trips") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  const CurveQ curves[] = {E11, E37, E389, CurveQ::from_longs(1, 0, 0, 0, 1)};
  int n = 0;
  for (int i = 0; i < 20; ++i) {
    const CurveQ& E = curves[i % 4];
    Lattice2 L = periods(E, 128);
    PrecComplex z = L.w1 * PrecComplex(Complex::from_double(u(rng), 0, 128)) +
                    L.w2 * PrecComplex(Complex::from_double(u(rng), 0, 128));
    ComplexPoint C = weierstrass_point(E, L, z);
    REQUIRE(!C.inf);
    PrecComplex z2 = elliptic_log(E, L, C);
    CHECK(L.lattice_distance(z - z2) < 1e-30);
    // x recomputed at twice the precision
    Lattice2 L2 = periods(E, 256);
    ComplexPoint C2 = weierstrass_point(E, L2, z2.with_prec(256));
    CHECK(dist(C2.x.with_prec(128), C.x) < 1e-28 * (1 + C.x.abs_upper().to_double()));
    ++n;
  }
  CHECK(n == 20);
  Lattice2 L = periods(E37, 128);
  CHECK(weierstrass_point(E37, L, L.w1).inf);
  CHECK(weierstrass_point(E37, L, PrecComplex::exact(0, 0, 128)).inf);
  // the rational point (0, 0) of 37a1 is recovered from its logarithm
  ComplexPoint C = weierstrass_point(E37, L, elliptic_log(E37, L, Point::affine(0, 0)));
  CHECK(C.x.abs_upper().to_double() < 1e-30);
  CHECK(C.y.abs_upper().to_double() < 1e-30);
  // and the log of that approximation, whose x-ball contains 0
  CHECK(L.lattice_distance(elliptic_log(E37, L, C) - elliptic_log(E37, L, Point::affine(0, 0))) < 1e-25);
}

TEST_CASE("canonical height examples") {
  HeightValue h = canonical_height(E37, Point::affine(0, 0));
  CHECK(std::abs(h.to_double() - 0.0511114) < 1e-7);
  double d8 = canonical_height_doubling(E37, Point::affine(0, 0), 8);
  double d10 = canonical_height_doubling(E37, Point::affine(0, 0), 10);
  CHECK(std::abs(d8 - d10) < 1e-6);
  CHECK(std::abs(h.to_double() - d10) < 1e-6);
  for (const Point& T : torsion_subgroup(E11).points) {
    HeightValue t = canonical_height(E11, T);
    CHECK(t.value.is_zero());
    CHECK(t.value < t.err.to_real(64));
  }
  CHECK_THROWS_AS(canonical_height(E37, Point::affine(1, 1)), InvalidInput);
}

TEST_CASE("canonical height agrees with the doubling limit across reduction types") {
  struct Case {
    CurveQ E;
    long x, y;
  };
  const Case cases[] = {{E389, 1, 0},
                        {CurveQ::from_longs(0, 0, 0, 0, -2), 3, 5},
                        {CurveQ::from_longs(0, 0, 0, 0, 17), -2, 3},
                        {CurveQ::from_longs(0, 0, 0, -25, 0), -4, 6},
                        {CurveQ::from_longs(0, 0, 0, 1, 1), 0, 1},
                        {CurveQ::from_longs(0, 0, 0, -1296, 11664), 0, 108},
                        {E5077, 0, 2}};
  for (const Case& c : cases) {
    Point P = Point::affine(c.x, c.y);
    REQUIRE(on_curve(c.E, P));
    double h = canonical_height(c.E, P).to_double();
    double d = canonical_height_doubling(c.E, P, 10);
    CHECK(std::abs(h - d) < 2e-5);
  }
}

TEST_CASE("canonical height is quadratic") {
  for (const CurveQ& E : {E37, E389, E5077}) {
    auto pts = nontorsion_points(E, 8);
    REQUIRE(pts.size() >= 2);
    for (size_t i = 0; i + 1 < pts.size() && i < 4; ++i) {
      const Point& P = pts[i];
      const Point& Q = pts[i + 1];
      double hP = canonical_height(E, P).to_double();
      double hQ = canonical_height(E, Q).to_double();
      double h2P = canonical_height(E, point_mul(E, P, 2)).to_double();
      CHECK(std::abs(h2P - 4 * hP) < 1e-10);
      CHECK(hP > 0);
      Point S = point_add(E, P, Q), D = point_sub(E, P, Q);
      double hS = S.inf ? 0 : canonical_height(E, S).to_double();
      double hD = D.inf ? 0 : canonical_height(E, D).to_double();
      CHECK(std::abs(hS + hD - 2 * hP - 2 * hQ) < 1e-8);
      CHECK(std::abs(canonical_height(E, point_neg(E, P)).to_double() - hP) < 1e-12);
    }
  }
}

TEST_CASE("canonical height does not depend on the model") {
  CurveQ big = CurveQ::from_longs(0, 0, 0, -1296, 11664);
  double a = canonical_height(big, Point::affine(0, 108)).to_double();
  double b = canonical_height(E37, Point::affine(0, 0)).to_double();
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("endomorphism ring examples") {
  CHECK(!endomorphism_ring(E11).cm);
  CHECK(endomorphism_ring(E11).to_string() == "Z");
  EndRing gi = endomorphism_ring(Econg);
  CHECK(gi.cm);
  CHECK(gi.disc == -4);
  CHECK(gi.to_string() == "Z[sqrt(-1)]");
  EndRing g3 = endomorphism_ring(CurveQ::from_longs(0, 0, 0, 0, -1));
  CHECK(g3.cm);
  CHECK(g3.disc == -3);
  CHECK(g3.to_string() == "Z[(1+sqrt(-3))/2]");
  CHECK(!endomorphism_ring(E37).cm);
  CHECK(!endomorphism_ring(E389).cm);
}

TEST_CASE("every rational CM j-invariant is detected with a lattice-preserving generator") {
  for (long D : class_number_one_discriminants()) {
    IntPoly H = hilbert_class_poly(Disc(D));
    REQUIRE(H.degree() == 1);
    mpq_class j(-H.coeff(0));
    CurveQ E = CurveQ::from_longs(0, 0, 0, 0, 1);
    if (j == 1728) {
      E = CurveQ::from_longs(0, 0, 0, 1, 0);
    } else if (j != 0) {
      mpq_class k = j - 1728;
      E = CurveQ(1, 0, 0, -36 / k, -1 / k);
    }
    REQUIRE(E.j() == j);
    EndRing R = endomorphism_ring(E);
    CHECK(R.cm);
    CHECK(R.disc == D);
    CHECK(R.trace * R.trace - 4 * R.norm == D);
    // the action matrix satisfies rho^2 - t rho + n = 0
    const auto& m = R.action;
    long a = m[0] * m[0] + m[2] * m[1], b = m[0] * m[2] + m[2] * m[3];
    long c = m[1] * m[0] + m[3] * m[1], d = m[1] * m[2] + m[3] * m[3];
    CHECK(a - R.trace * m[0] + R.norm == 0);
    CHECK(b - R.trace * m[2] == 0);
    CHECK(c - R.trace * m[1] == 0);
    CHECK(d - R.trace * m[3] + R.norm == 0);
  }
}

TEST_CASE("empirical eta") {
  auto e37 = empirical_eta(E37, 10);
  REQUIRE(e37.has_value());
  CHECK(std::abs(e37->to_double() - 0.0511114) < 1e-7);
  CHECK(!empirical_eta(E11, 10).has_value());
  auto e389 = empirical_eta(E389, 10);
  REQUIRE(e389.has_value());
  double a = canonical_height(E389, Point::affine(0, 0)).to_double();
  double b = canonical_height(E389, Point::affine(1, 0)).to_double();
  CHECK(std::abs(e389->to_double() - std::min(a, b)) < 1e-12);
}
