#include <random>

#include "cmrel/elliptic/torsion.hpp"
#include "cmrel/error.hpp"
#include "cmrel/relations/relations.hpp"
#include "doctest.h"

using namespace cmrel;

namespace {

const CurveQ E37 = CurveQ::from_longs(0, 0, 1, -1, 0);
const CurveQ E11 = CurveQ::from_longs(0, -1, 1, -10, -20);
const CurveQ E389 = CurveQ::from_longs(0, 1, 1, -2, 0);

// Hermite form of every m in [-B, B]^n with sum m_i k_i = 0. For multiples
// x_i = k_i P of a point of infinite order on a curve without torsion this is
// the full relation lattice once B reaches a basis.
IntMatrix box_oracle(const std::vector<long>& k, long B) {
  const size_t n = k.size();
  IntMatrix H(0, n);
  std::vector<long> m(n, -B);
  while (true) {
    long s = 0;
    bool zero = true;
    for (size_t i = 0; i < n; ++i) {
      s += m[i] * k[i];
      zero = zero && m[i] == 0;
    }
    if (s == 0 && !zero) {
      IntVec v(m.begin(), m.end()), x;
      if (H.rows() == 0 || !solve_integral(H, v, x)) {
        H.append_row(v);
        H = hermite_form(H);
      }
    }
    size_t i = 0;
    while (i < n && m[i] == B) m[i++] = -B;
    if (i == n) break;
    ++m[i];
  }
  return H;
}

}  // namespace

TEST_CASE("Masser bound") {
  CHECK(masser_bound({1, 1, 3.0, 3.0, false}).to_double() == 1);
  CHECK(masser_bound({2, 5, 4.0, 1.0, false}).to_double() == 20);
  CHECK(masser_bound({1, 2, 9.0, 1.0, true}).to_double() == 12);
  CHECK(masser_coefficient_bound({2, 5, 4.0, 1.0, false}) == 20);
  CHECK(masser_coefficient_bound({2, 1, 2.0, 1.0, false}) == 3);  // 2 sqrt 2
  CHECK_THROWS_AS(masser_bound({2, 1, 0.5, 1.0, false}), InvalidInput);
  CHECK_THROWS_AS(masser_bound({0, 1, 1.0, 1.0, false}), InvalidInput);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(1.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    long n = 1 + static_cast<long>(rng() % 4);
    long w = 1 + static_cast<long>(rng() % 16);
    bool cm = rng() % 2;
    double eta = u(rng) / 10, q = eta * u(rng);
    double b = masser_bound({n, w, q, eta, cm}).to_double();
    CHECK(masser_bound({n, w, q * 1.5, eta, cm}).to_double() >= b);
    CHECK(masser_bound({n, w + 1, q, eta, cm}).to_double() >= b);
    if (q >= eta * 1.2) CHECK(masser_bound({n, w, q, eta * 1.2, cm}).to_double() <= b);
  }
}

TEST_CASE("exact relation checks") {
  const Point P = Point::affine(0, 0), Q = Point::affine(1, 0);
  CHECK(verify_relation_exact(E37, {P, Q}, {0, 0}, Point::infinity()));
  CHECK(verify_relation_exact(E37, {P, Q}, {2, -1}, Point::infinity()));
  CHECK(!verify_relation_exact(E389, {P, Q}, {1, -1}, Point::infinity()));
  TorsionGroup tg = torsion_subgroup(E11);
  REQUIRE(tg.order() == 5);
  const Point T = tg.generators.at(0);
  CHECK(verify_relation_exact(E11, {T}, {5}, Point::infinity()));
  CHECK(!verify_relation_exact(E11, {T}, {2}, Point::infinity()));
  CHECK(verify_relation_exact(E11, {T}, {2}, point_mul(E11, T, 2)));
  CHECK_THROWS_AS(verify_relation_exact(E37, {Point::affine(1, 1)}, {1}, Point::infinity()), InvalidInput);
}

TEST_CASE("relation lattices") {
  const Point P = Point::affine(0, 0);
  SUBCASE("planted multiple") {
    RelationLattice rl = relation_lattice(E37, {P, point_mul(E37, P, 2)});
    CHECK(rl.completeness == Completeness::MasserBound);
    CHECK(rl.basis == IntMatrix::from_longs({{2, -1}}));
    REQUIRE(rl.torsion.size() == 1);
    CHECK(rl.torsion[0].order() == 1);
    CosetDesc c = smallest_torsion_coset(rl);
    CHECK(c.dim == 1);
    CHECK(c.t == 1);
    CHECK(c.proper());
  }
  SUBCASE("torsion generator") {
    const Point T = torsion_subgroup(E11).generators.at(0);
    RelationLattice rl = relation_lattice(E11, {T});
    CHECK(rl.completeness == Completeness::UpToCap);
    CHECK(rl.completeness_label() == "complete up to cap");
    // modulo torsion T itself is a relation; its torsion value is T
    CHECK(rl.basis == IntMatrix::from_longs({{1}}));
    REQUIRE(rl.torsion.size() == 1);
    CHECK(rl.torsion[0].order() == 5);
    REQUIRE(rl.torsion[0].point.has_value());
    CHECK(*rl.torsion[0].point == T);
    CHECK(rl.exact_relations(E11) == IntMatrix::from_longs({{5}}));
    CosetDesc c = smallest_torsion_coset(rl);
    CHECK(c.dim == 0);
    CHECK(c.t == 5);
  }
  SUBCASE("independent generators") {
    RelationLattice rl = relation_lattice(E389, {P, Point::affine(1, 0)});
    CHECK(rl.basis.rows() == 0);
    CosetDesc c = smallest_torsion_coset(rl);
    CHECK(c.dim == 2);
    CHECK(!c.proper());
  }
  SUBCASE("three points, one relation") {
    const Point A = Point::affine(0, 0), B = Point::affine(1, 0);
    const Point C = point_add(E389, point_mul(E389, A, 3), point_mul(E389, B, -2));
    RelationLattice rl = relation_lattice(E389, {A, B, C});
    CHECK(rl.basis == IntMatrix::from_longs({{3, -2, -1}}));
    CHECK(smallest_torsion_coset(rl).dim == 2);
  }
  SUBCASE("point not on curve") {
    CHECK_THROWS_AS(relation_lattice(E37, {Point::affine(1, 1)}), InvalidInput);
  }
}

TEST_CASE("relation lattices agree with an exhaustive search") {
  std::mt19937 rng(2024);
  const Point P = Point::affine(0, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const size_t n = 1 + trial % 3;
    std::vector<long> k(n);
    std::vector<Point> pts;
    for (auto& ki : k) {
      ki = static_cast<long>(rng() % 21) - 10;
      pts.push_back(point_mul(E37, P, ki));
    }
    RelationLattice rl = relation_lattice(E37, pts);
    CHECK(rl.basis == box_oracle(k, 10));
    for (size_t i = 0; i < rl.basis.rows(); ++i)
      CHECK(verify_relation_exact(E37, pts, rl.basis.row(i), Point::infinity()));
  }
}

TEST_CASE("relation up to 2-torsion on a CM curve") {
  const CurveQ E = CurveQ::from_longs(0, 0, 0, -25, 0);
  const Point P = Point::affine(-4, 6), T = Point::affine(0, 0);
  const Point Q = point_add(E, point_mul(E, P, 3), T);
  RelationLattice rl = relation_lattice(E, {P, Q});
  REQUIRE(rl.end.cm);
  // over Z[i] the relation is 3 P - Q = T
  CHECK(rl.rank() == 1);
  for (size_t i = 0; i < rl.basis.rows(); ++i) {
    std::vector<RelPoint> rp{RelPoint::rational(P), RelPoint::rational(Q)};
    const Point target = rl.torsion[i].point.value_or(Point::infinity());
    CHECK(verify_relation(E, rl.end, rp, rl.basis.row(i), target, 256));
  }
  CosetDesc c = smallest_torsion_coset(rl);
  CHECK(c.dim == 1);
  CHECK(c.t == 2);
}

TEST_CASE("complex multiplication relation") {
  const CurveQ E = CurveQ::from_longs(0, 0, 0, -25, 0);
  const Prec p = 256;
  const Point P = Point::affine(-4, 6);
  // [i](x, y) = (-x, i y)
  ComplexPoint iP;
  iP.inf = false;
  iP.x = PrecComplex::exact(4, 0, p);
  iP.y = PrecComplex::exact(0, 6, p);
  RelationLattice rl = relation_lattice(E, {RelPoint::rational(P), RelPoint::numeric(iP)}, {.prec = p});
  REQUIRE(rl.end.cm);
  CHECK(rl.completeness == Completeness::UpToCap);
  CHECK(rl.rank() == 1);
  REQUIRE(rl.basis.rows() == 2);
  for (size_t i = 0; i < 2; ++i) CHECK(max_abs(rl.basis.row(i)) == 1);
  CHECK(smallest_torsion_coset(rl).dim == 1);

  RelationLattice single = relation_lattice(E, std::vector<Point>{P});
  CHECK(single.basis.rows() == 0);
}
