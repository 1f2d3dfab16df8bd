#include <cmath>
#include <random>

#include "cmrel/error.hpp"
#include "cmrel/modular/isogeny.hpp"
#include "cmrel/modular/jfunction.hpp"
#include "cmrel/modular/modpoly.hpp"
#include "cmrel/numerics/algebraic.hpp"
#include "doctest.h"

using namespace cmrel;

namespace {

// j = E4^3 / Delta with E4 as a Lambert series and Delta as the product
// q prod (1 - q^n)^24, summed in plain floating point at the given precision.
Complex j_oracle(const Complex& tau, Prec p) {
  Complex two_pi_i(Real(0, p), Real::pi(p) * 2);
  Complex q = exp(two_pi_i * tau);
  Complex one(Real(1, p), Real(0, p));
  Complex e4 = one, prod = one, qn = one;
  Real eps = mul_2si(Real(1, p), -static_cast<long>(p) - 8);
  for (long n = 1; n < 100000; ++n) {
    qn *= q;
    if (abs(qn) < eps) break;
    Complex term = qn / (one - qn) * Real(n * n * n * 240, p);
    e4 += term;
    prod *= one - qn;
  }
  Complex p2 = prod * prod, p4 = p2 * p2, p8 = p4 * p4, p16 = p8 * p8;
  Complex delta = q * p16 * p8;
  return e4 * e4 * e4 / delta;
}

PrecComplex point(double re, double im, Prec p) {
  return PrecComplex(Complex::from_double(re, im, p), Mag());
}

bool close(const PrecComplex& a, const Complex& b, double tol) {
  return (a.abs_upper().to_double() + 1) * tol >= abs(a.mid() - b).to_double();
}

std::vector<PrecComplex> random_fd_points(int n, Prec p, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.87, 2.0);
  std::vector<PrecComplex> out;
  while (static_cast<int>(out.size()) < n) {
    double x = re(rng), y = im(rng);
    if (x * x + y * y < 1) continue;
    out.push_back(point(x, y, p));
  }
  return out;
}

}  // namespace

TEST_CASE("fundamental domain reduction examples") {
  const Prec p = 128;
  auto [t1, g1] = reduce_to_fundamental_domain(point(5, 1, p));
  CHECK(g1 == MobiusMap::translation(-5));
  CHECK(std::abs(t1.re().to_double()) < 1e-30);
  CHECK(t1.im().to_double() == doctest::Approx(1.0));

  auto [t2, g2] = reduce_to_fundamental_domain(point(0, 2, p));
  CHECK(g2 == MobiusMap::identity());
  CHECK(t2.im().to_double() == doctest::Approx(2.0));

  auto [t3, g3] = reduce_to_fundamental_domain(point(0, 0.5, p));
  CHECK(g3 == MobiusMap::inversion());
  CHECK(t3.im().to_double() == doctest::Approx(2.0));

  // boundary: rho maps to rho + 1
  auto [t4, g4] = reduce_to_fundamental_domain(TauPoint({1, 1, 1}).value(p));
  CHECK(t4.re().to_double() == doctest::Approx(0.5));

  CHECK_THROWS_WITH_AS(reduce_to_fundamental_domain(point(0.3, -1, p)), "not in upper half plane",
                       InvalidInput);
}

TEST_CASE("fundamental domain reduction is idempotent and consistent") {
  const Prec p = 192;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(-30, 30), im(0.01, 3);
  for (int it = 0; it < 40; ++it) {
    PrecComplex tau = point(re(rng), im(rng), p);
    auto [red, g] = reduce_to_fundamental_domain(tau);
    CHECK(g.det() == 1);
    double x = red.re().to_double(), y = red.im().to_double();
    CHECK(std::abs(x) <= 0.5 + 1e-12);
    CHECK(x * x + y * y >= 1 - 1e-12);
    CHECK((g.apply(tau) - red).abs_upper().to_double() < 1e-40);
    auto [again, g2] = reduce_to_fundamental_domain(red);
    CHECK(g2 == MobiusMap::identity());
    PrecComplex ja = j_invariant(tau, p), jb = j_invariant(red, p);
    CHECK((ja - jb).contains_zero());
  }
}

TEST_CASE("j coefficients") {
  CHECK(j_coefficient(-1) == 1);
  CHECK(j_coefficient(0) == 744);
  CHECK(j_coefficient(1) == 196884);
  CHECK(j_coefficient(2) == 21493760);
  CHECK(j_coefficient(3) == 864299970);
}

TEST_CASE("j-invariant at special points") {
  const Prec p = 256;
  PrecComplex ji = j_invariant(TauPoint({1, 0, 1}), p);
  CHECK(close(ji, j_oracle(TauPoint({1, 0, 1}).value(2 * p).mid(), 2 * p), 1e-60));
  CHECK(ji.contains_zero() == false);
  CHECK((ji - PrecComplex::exact(1728, 0, p)).contains_zero());
  CHECK(ji.err().to_double() < 1e-60);

  PrecComplex jr = j_invariant(TauPoint({1, 1, 1}), p);
  CHECK(jr.contains_zero());
  CHECK(jr.err().to_double() < 1e-60);
  CHECK(abs(j_oracle(TauPoint({1, 1, 1}).value(2 * p).mid(), 2 * p)).to_double() < 1e-60);

  PrecComplex j2i = j_invariant(TauPoint({1, 0, 4}), p);
  auto rec = recognize_algebraic(j2i, 1, mpz_class(1) << 40, p);
  REQUIRE(rec);
  CHECK(rec->to_string() == "X - 287496");
}

TEST_CASE("j-invariant against the Eisenstein oracle") {
  const Prec p = 160;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(-3, 3), im(0.2, 2.5);
  for (int it = 0; it < 25; ++it) {
    PrecComplex tau = point(re(rng), im(rng), p);
    PrecComplex j = j_invariant(tau, p);
    // reduce for the oracle only through its own q-expansion domain
    auto [red, g] = reduce_to_fundamental_domain(tau.with_prec(2 * p));
    Complex want = j_oracle(red.mid(), 2 * p);
    CHECK(abs(j.mid() - want) <= Real::from_double(j.err().to_double() * 1.0001 + 1e-300, 64) +
                                     abs(want) * mul_2si(Real(1, 64), -static_cast<long>(p) + 8));
  }
}

TEST_CASE("modular polynomials: small levels") {
  const ModPoly& m1 = modular_polynomial(1);
  CHECK(m1.poly.at(1, 0) == 1);
  CHECK(m1.poly.at(0, 1) == -1);
  CHECK(m1.poly.at(0, 0) == 0);

  const ModPoly& m2 = modular_polynomial(2);
  CHECK(m2.poly.deg_x() == 3);
  CHECK(m2.poly.eval(mpq_class(1728), mpq_class(287496)) == 0);
  CHECK(m2.poly.at(0, 0) == mpz_class("-157464000000000"));
  CHECK(m2.poly.at(1, 1) == 40773375);

  const ModPoly& m3 = modular_polynomial(3);
  CHECK(m3.poly.is_symmetric());
  CHECK(m3.poly.deg_x() == 4);

  CHECK_THROWS_WITH_AS(modular_polynomial(21), "level out of supported range", InvalidInput);
  CHECK_THROWS_AS(modular_polynomial(0), InvalidInput);
}

TEST_CASE("psi and isogeny representatives") {
  for (long N = 1; N <= 40; ++N) {
    // brute force count of primitive (a, b, d)
    long count = 0;
    for (long a = 1; a <= N; ++a)
      if (N % a == 0)
        for (long b = 0; b < N / a; ++b)
          if (std::gcd(std::gcd(a, b), N / a) == 1) ++count;
    CHECK(psi(N) == count);
    CHECK(static_cast<long>(cyclic_isogeny_reps(N).size()) == count);
  }
  CHECK(psi(20) == 36);
}

TEST_CASE("modular polynomials vanish on (j(tau), j(N tau))") {
  const Prec p = 256;
  auto pts = random_fd_points(50, p, 3);
  for (int N : {2, 3, 5}) {
    const ModPoly& mp = modular_polynomial(N);
    CHECK(mp.poly.deg_x() == psi(N));
    CHECK(mp.poly.deg_y() == psi(N));
    CHECK(mp.poly.is_symmetric());
    for (const auto& tau : pts) {
      PrecComplex v = mp.poly.eval(j_invariant(tau, p), j_invariant(tau * N, p));
      CHECK(v.contains_zero());
    }
  }
}

TEST_CASE("modular polynomial rounding agrees across precisions") {
  for (int N : {2, 3, 5}) CHECK(compute_modular_polynomial(N, 256).poly ==
                                compute_modular_polynomial(N, 512).poly);
}

TEST_CASE("in_XN examples") {
  TauPoint i({1, 0, 1}), two_i({1, 0, 4}), rho({1, 1, 1});
  CHECK(in_XN(i, i, 1));
  CHECK(in_XN(i, two_i, 2));
  CHECK(!in_XN(rho, i, 2));
  CHECK(modular_polynomial(2).poly.eval(mpq_class(0), mpq_class(1728)) != 0);
}

TEST_CASE("exact in_XN agrees with the numeric test and is symmetric") {
  const Prec p = 256;
  std::vector<TauPoint> pts;
  for (long D : {-3, -4, -7, -12, -16, -27, -28, -36, -15, -60, -63})
    for (const auto& f : reduced_forms(Disc(D))) pts.emplace_back(f);
  int positives = 0;
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = 0; b < pts.size(); ++b)
      for (long N = 1; N <= 4; ++N) {
        bool ex = in_XN(pts[a], pts[b], N);
        if (N > 1) CHECK(ex == in_XN(pts[b], pts[a], N));
        bool num = in_XN_numeric(j_invariant(pts[a], p), j_invariant(pts[b], p), N, p);
        CHECK(ex == num);
        positives += ex;
      }
  CHECK(positives > 10);
}

TEST_CASE("in_XN numeric escalates when undecidable") {
  PrecComplex x = j_invariant(point(0.1, 1.3, 64), 64);
  PrecComplex wide = x;
  wide.add_err(Mag(1e6));
  CHECK_THROWS_WITH_AS(in_XN_numeric(x, wide, 2, 64), "indeterminate at current precision",
                       Indeterminate);
}

TEST_CASE("hecke neighbors") {
  const Prec p = 256;
  PrecComplex j0 = j_invariant(point(0, 1.1, p), p);
  auto n2 = hecke_neighbors(j0, 2, p);
  CHECK(n2.size() == 3);
  PrecComplex j2 = j_invariant(point(0, 2.2, p), p);
  int hits = 0;
  for (const auto& r : n2)
    if ((r - j2).contains_zero()) ++hits;
  CHECK(hits == 1);

  auto n1 = hecke_neighbors(j0, 1, p);
  REQUIRE(n1.size() == 1);
  CHECK((n1[0] - j0).contains_zero());

  IntPoly h = hecke_neighbor_poly(1728, 2);
  CHECK(h.degree() == 3);
  CHECK(h.eval(mpq_class(287496)) == 0);
  auto roots = hecke_neighbors(PrecComplex::exact(1728, 0, p), 2, p);
  hits = 0;
  for (const auto& r : roots)
    if ((r - PrecComplex::exact(287496, 0, p)).contains_zero()) ++hits;
  CHECK(hits >= 1);

  // CM neighbours have the predicted j-values
  TauPoint s({1, 1, 2});
  auto pts = hecke_neighbor_points(s, 3);
  auto nums = hecke_neighbors(j_invariant(s, p), 3, p);
  CHECK(pts.size() == nums.size());
  for (const auto& t : pts) {
    PrecComplex jt = j_invariant(t, p);
    bool found = false;
    for (const auto& r : nums) found = found || (r - jt).contains_zero();
    CHECK(found);
  }
}

TEST_CASE("heights of quadratic points") {
  CHECK(height_of_quadratic_point(TauPoint({1, 0, 1})).to_double() == doctest::Approx(1.0));
  CHECK(height_of_quadratic_point(TauPoint({1, 1, 6})).to_double() ==
        doctest::Approx(std::sqrt(6.0)));
  // Mahler measure a * prod max(1, |root|) from numeric roots, two precisions
  for (QuadForm f : std::vector<QuadForm>{{2, 1, 3}, {5, 3, 2}, {7, -5, 11}, {3, 3, 1}}) {
    for (Prec p : {64, 128}) {
      auto roots = complex_roots(IntPoly::from_longs({f.c, f.b, f.a}), p);
      double m = static_cast<double>(f.a);
      for (const auto& r : roots) m *= std::max(1.0, abs(r.mid()).to_double());
      CHECK(height_of_quadratic_point(TauPoint(f), p).to_double() ==
            doctest::Approx(std::sqrt(m)).epsilon(1e-12));
    }
  }
}

TEST_CASE("D-independence") {
  TauPoint r3({1, 1, 1}), r4({1, 0, 1});
  auto a = is_D_independent({r3, r4}, 2);
  CHECK(a.independent);
  CHECK(a.witness.empty());
  auto b = is_D_independent({r3, r4}, 4);
  CHECK(!b.independent);
  CHECK(b.index == 0u);
  CHECK(b.witness == "|-3| <= 4 at index 0");

  TauPoint s({1, 1, 2});
  TauPoint s2 = TauPoint(transform_form(s.form(), {2, 0, 0, 1}));
  CHECK(s2.disc() == -28);
  auto c = is_D_independent({s, s2}, 2);
  CHECK(!c.independent);
  CHECK(c.level == 2);
  CHECK(c.witness == "pair (0,1) in X_2");
}
