#include <cmath>
#include <random>

#include "cmrel/error.hpp"
#include "cmrel/numerics/algebraic.hpp"
#include "cmrel/numerics/factor.hpp"
#include "cmrel/numerics/intmat.hpp"
#include "cmrel/numerics/qseries.hpp"
#include "cmrel/numerics/relation.hpp"
#include "doctest.h"

using namespace cmrel;

namespace {

PrecComplex real_ball(const Real& x) { return PrecComplex::from_real(x, rounding_err(Complex(x))); }

Real golden(Prec p) { return (Real(1, p) + sqrt(Real(5, p))) / 2; }

}  // namespace

TEST_CASE("Real and Complex basics") {
  Real a(3, 128), b = Real::from_string("0.5", 128);
  CHECK((a * b).to_double() == doctest::Approx(1.5));
  CHECK(Real::pi(200).to_string(10) == "3.141592654");
  Complex z(Real(3, 64), Real(4, 64));
  CHECK(abs(z).to_double() == doctest::Approx(5.0));
  Complex s = sqrt(Complex(Real(-4, 64), Real(0, 64)));
  CHECK(s.im.to_double() == doctest::Approx(2.0));
  CHECK(Real::from_double(0.375, 64).to_rational() == mpq_class(3, 8));
}

TEST_CASE("Mag rounds upward") {
  Mag m(1.0);
  Mag third = m.div_upper(Mag(3.0));
  CHECK(third.to_double() >= 1.0 / 3.0);
  CHECK(Mag(2.0).sub_to_lower(Mag(3.0)).is_zero());
  CHECK(Mag::pow2(-5000).exponent() == -4999);
}

TEST_CASE("reduce_lattice on the identity") {
  IntMatrix id = IntMatrix::identity(3);
  CHECK(reduce_lattice(id) == id);
}

TEST_CASE("reduce_lattice finds the shortest vector of a planar lattice") {
  IntMatrix b = IntMatrix::from_longs({{201, 37}, {1648, 297}});
  IntMatrix r = reduce_lattice(b);
  // brute force over small coefficient pairs
  long best = -1;
  for (long c1 = -50; c1 <= 50; ++c1)
    for (long c2 = -50; c2 <= 50; ++c2) {
      if (c1 == 0 && c2 == 0) continue;
      long x = c1 * 201 + c2 * 1648, y = c1 * 37 + c2 * 297;
      long n = x * x + y * y;
      if (best < 0 || n < best) best = n;
    }
  CHECK(squared_norm(r.row(0)) == best);
  CHECK(hermite_form(r) == hermite_form(b));
}

TEST_CASE("reduce_lattice rejects dependent rows") {
  IntMatrix b = IntMatrix::from_longs({{1, 2, 3}, {2, 4, 6}});
  CHECK_THROWS_WITH_AS(reduce_lattice(b), "degenerate basis", InvalidInput);
}

TEST_CASE("LLL preserves the lattice and the Gram determinant") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<long> d(-20, 20);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix b(4, 5);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 5; ++j) b.at(i, j) = d(rng);
    if (matrix_rank(b) < 4) continue;
    // random unimodular transform
    IntMatrix u = IntMatrix::identity(4);
    for (int k = 0; k < 6; ++k) {
      size_t i = static_cast<size_t>(k % 4), j = static_cast<size_t>((k + 1) % 4);
      for (size_t c = 0; c < 4; ++c) u.at(i, c) += 3 * u.at(j, c);
    }
    IntMatrix t = u * b;
    IntMatrix r = reduce_lattice(t);
    CHECK(gram_determinant(r) == gram_determinant(b));
    CHECK(hermite_form(r) == hermite_form(b));
    // LLL bound on the first vector against the shortest basis row of b
    mpz_class shortest = squared_norm(b.row(0));
    for (size_t i = 1; i < 4; ++i) shortest = std::min(shortest, squared_norm(b.row(i)));
    CHECK(squared_norm(r.row(0)) <= 8 * shortest);
  }
}

TEST_CASE("kernels, saturation and intersection") {
  IntMatrix a = IntMatrix::from_longs({{2, 4}, {0, 6}});
  IntMatrix sat = saturate(a);
  CHECK(sat == IntMatrix::identity(2));
  IntMatrix k = left_kernel(IntMatrix::from_longs({{1, 1}, {2, 2}, {0, 1}}));
  REQUIRE(k.rows() == 1);
  CHECK(k.row(0) == IntVec{2, -1, 0});
  IntMatrix l1 = IntMatrix::from_longs({{2, 0}, {0, 1}});
  IntMatrix l2 = IntMatrix::from_longs({{1, 0}, {0, 3}});
  CHECK(lattice_intersection(l1, l2) == IntMatrix::from_longs({{2, 0}, {0, 3}}));
  CHECK(lattice_contains(l1, IntMatrix::from_longs({{4, 7}})));
  CHECK_FALSE(lattice_contains(l1, IntMatrix::from_longs({{1, 0}})));
  IntVec x;
  CHECK(solve_integral(l1, IntVec{4, 5}, x));
  CHECK(x == IntVec{2, 5});
  CHECK_FALSE(solve_integral(l1, IntVec{3, 5}, x));
}

TEST_CASE("find_integer_relation: duplicate entry") {
  Prec p = 256;
  PrecComplex z(Complex(Real::from_string("0.7236", p), Real::from_string("1.113", p)));
  auto r = find_integer_relation({z, z}, 100, p);
  REQUIRE(r);
  CHECK(*r == IntVec{1, -1});
}

TEST_CASE("find_integer_relation: golden ratio, re-verified at doubled precision") {
  Prec p = 256;
  Real g = golden(p);
  auto r = find_integer_relation({real_ball(Real(1, p)), real_ball(g), real_ball(g * g)}, 100, p);
  REQUIRE(r);
  CHECK(*r == IntVec{1, 1, -1});
  Real g2 = golden(2 * p);
  Mag res = relation_residual({real_ball(Real(1, 2 * p)), real_ball(g2), real_ball(g2 * g2)}, *r);
  CHECK(res < Mag::pow2(-static_cast<long>(p) / 2));
}

TEST_CASE("find_integer_relation: 1 and pi admit no small relation") {
  Prec p = 256;
  auto r = find_integer_relation({real_ball(Real(1, p)), real_ball(Real::pi(p))}, 1000, p);
  CHECK_FALSE(r);
  // exhaustive oracle: the smallest |m1 + m2 pi| with |m| <= 1000 is far above 2^-64
  double best = 1e9;
  for (long m2 = 1; m2 <= 1000; ++m2) {
    double v = static_cast<double>(m2) * M_PI;
    best = std::min(best, std::fabs(v - std::round(v)));
  }
  CHECK(best > std::ldexp(1.0, -64));
}

TEST_CASE("find_integer_relation refuses an unreachable coefficient bound") {
  Prec p = 64;
  PrecComplex z(Complex(Real::pi(p)), Mag::pow2(-40));
  CHECK_THROWS_AS(find_integer_relation({z, z, z, z}, mpz_class("1000000000000"), p),
                  InsufficientPrecision);
}

TEST_CASE("find_relation_lattice returns the full relation lattice") {
  Prec p = 256;
  Real a = Real::pi(p), b = sqrt(Real(2, p));
  std::vector<PrecComplex> v{real_ball(a), real_ball(b), real_ball(a * 3 + b * 2),
                             real_ball(a - b)};
  IntMatrix l = find_relation_lattice(v, 100, p);
  CHECK(l.rows() == 2);
  IntMatrix expected = hermite_form(IntMatrix::from_longs({{3, 2, -1, 0}, {1, -1, 0, -1}}));
  CHECK(hermite_form(l) == saturate(expected));
}

TEST_CASE("eval_qseries: zero series and geometric series") {
  Prec p = 256;
  PrecComplex i = PrecComplex::exact(0, 1, p);
  QSeries zero(0, {0}, Mag(), Mag());
  PrecComplex z = eval_qseries(zero, i);
  CHECK(z.mid().is_zero());
  CHECK(z.err().is_zero());

  std::vector<mpq_class> ones(60, 1);
  ones[0] = 0;
  QSeries geo(0, ones, Mag(1.0), Mag(1.0));
  PrecComplex g = eval_qseries(geo, i);
  Real q = exp(Real::pi(p) * -2);
  Real closed = q / (Real(1, p) - q);
  Mag diff = Mag::from_abs_upper(g.mid() - Complex(closed));
  CHECK(diff <= g.err() + rounding_err(Complex(closed)).mul_2si(2));
  CHECK(g.err() < Mag::pow2(-200));
  CHECK_THROWS_WITH_AS(eval_qseries(geo, PrecComplex::exact(0, -1, p)), "not in upper half plane",
                       InvalidInput);
}

TEST_CASE("eval_qseries tail bound covers the truncation gap") {
  Prec p = 256;
  std::vector<mpq_class> c(80);
  for (size_t n = 1; n < c.size(); ++n) c[n] = mpq_class((n % 7 == 0 ? -2 : 1), 1);
  QSeries full(0, c, Mag(2.0), Mag(1.0));
  QSeries half = full.truncated(39);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5), v(0.3, 2.0);
  for (int t = 0; t < 20; ++t) {
    PrecComplex tau = PrecComplex(Complex::from_double(u(rng), v(rng), p));
    PrecComplex a = eval_qseries(half, tau), b = eval_qseries(full, tau);
    CHECK(Mag::from_abs_upper((a - b).mid()) <= a.err());
  }
}

TEST_CASE("ball error radius covers the doubled-precision result") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  std::uniform_int_distribution<int> op(0, 5);
  for (int trial = 0; trial < 60; ++trial) {
    Prec p = 80, p2 = 160;
    std::vector<std::pair<double, double>> leaves;
    for (int i = 0; i < 6; ++i) leaves.emplace_back(u(rng), u(rng));
    std::vector<int> ops;
    for (int i = 0; i < 5; ++i) ops.push_back(op(rng));
    auto run = [&](Prec prec) {
      PrecComplex acc(Complex::from_double(leaves[0].first, leaves[0].second, prec));
      for (int i = 0; i < 5; ++i) {
        PrecComplex x(Complex::from_double(leaves[static_cast<size_t>(i) + 1].first,
                                           leaves[static_cast<size_t>(i) + 1].second, prec));
        switch (ops[static_cast<size_t>(i)]) {
          case 0: acc += x; break;
          case 1: acc -= x; break;
          case 2: acc *= x; break;
          case 3: acc /= x; break;
          case 4: acc = exp(acc / 4) + x; break;
          default: acc = sqrt(acc * acc + x * x + PrecComplex::exact(3, 0, prec)); break;
        }
      }
      return acc;
    };
    PrecComplex lo = run(p), hi = run(p2);
    CHECK(Mag::from_abs_upper((lo.mid().with_prec(p2) - hi.mid())) <= lo.err() + hi.err());
  }
}

TEST_CASE("recognize_algebraic") {
  Prec p = 256;
  PrecComplex z(Complex(Real(1728, p), Real::from_string("1e-70", p)));
  auto r = recognize_algebraic(z, 3, 1000000, p);
  REQUIRE(r);
  CHECK(r->to_string() == "X - 1728");

  auto s = recognize_algebraic(real_ball(sqrt(Real(2, p))), 4, 1000000, p);
  REQUIRE(s);
  CHECK(*s == IntPoly::from_longs({-2, 0, 1}));

  Real e = exp(Real(1, p));
  CHECK_FALSE(recognize_algebraic(real_ball(e), 4, 1000000, p));
  // exhaustive oracle over small coefficients: nothing vanishes at e
  double ed = std::exp(1.0), best = 1e9;
  for (int c4 = 0; c4 <= 6; ++c4)
    for (int c3 = -6; c3 <= 6; ++c3)
      for (int c2 = -6; c2 <= 6; ++c2)
        for (int c1 = -6; c1 <= 6; ++c1)
          for (int c0 = -6; c0 <= 6; ++c0) {
            if (!c4 && !c3 && !c2 && !c1 && !c0) continue;
            double v = (((c4 * ed + c3) * ed + c2) * ed + c1) * ed + c0;
            best = std::min(best, std::fabs(v));
          }
  CHECK(best > 1e-6);
}

TEST_CASE("polynomial roots and products") {
  IntPoly f = IntPoly::from_longs({-6, 11, -6, 1});
  auto roots = complex_roots(f, 128);
  REQUIRE(roots.size() == 3);
  std::vector<double> re;
  for (auto& r : roots) re.push_back(r.re().to_double());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(1.0));
  CHECK(re[2] == doctest::Approx(3.0));
  auto back = round_to_intpoly(poly_from_roots(roots));
  REQUIRE(back);
  CHECK(*back == f);
  CHECK(f.to_string() == "X^3 - 6*X^2 + 11*X - 6");
}

TEST_CASE("irreducibility tests") {
  IntPoly x4p1 = IntPoly::from_longs({1, 0, 0, 0, 1});  // irreducible, never irreducible mod p
  CHECK(irreducibility_filter(x4p1) == Irreducibility::kUnknown);
  CHECK(certify_irreducible(x4p1, complex_roots(x4p1, 128)) == std::optional<bool>(true));
  IntPoly red = IntPoly::from_longs({-2, 0, 1}) * IntPoly::from_longs({-3, 0, 1});
  CHECK(certify_irreducible(red, complex_roots(red, 128)) == std::optional<bool>(false));
  IntPoly cubic = IntPoly::from_longs({1, -1, 0, 1});
  CHECK(irreducibility_filter(cubic) == Irreducibility::kIrreducible);
  CHECK(factor_degrees_mod_p(IntPoly::from_longs({-1, 0, 1}), 7) == std::vector<int>{1, 1});
}

TEST_CASE("factorization") {
  auto f = factorize(mpz_class("1000000016000000063"));  // 1000000007 * 1000000009
  REQUIRE(f.size() == 2);
  CHECK(f[0].first == 1000000007);
  CHECK(f[1].first == 1000000009);
  auto g = factorize(-37 * 37 * 8);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == std::make_pair(mpz_class(2), 3));
  CHECK(g[1] == std::make_pair(mpz_class(37), 2));
}
