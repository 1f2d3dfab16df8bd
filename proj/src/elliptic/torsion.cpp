#include "cmrel/elliptic/torsion.hpp"

#include <algorithm>
#include <set>

#include "cmrel/elliptic/tate.hpp"
#include "cmrel/error.hpp"
#include "cmrel/numerics/factor.hpp"
#include "cmrel/numerics/poly.hpp"

namespace cmrel {

long point_order(const CurveQ& E, const Point& P) {
  if (!on_curve(E, P)) throw InvalidInput("point not on curve");
  Point Q = P;
  for (long n = 1; n <= 12; ++n) {
    if (Q.inf) return n;
    Q = point_add(E, Q, P);
  }
  return 0;
}

namespace {

std::vector<mpz_class> integer_roots(const IntPoly& f) {
  std::vector<mpz_class> out;
  Prec p = 64;
  for (const auto& c : f.coeffs()) p = std::max<Prec>(p, mpz_sizeinbase(c.get_mpz_t(), 2) + 64);
  for (const auto& r : complex_roots(f, p)) {
    if (abs(r.im()).to_double() > 1) continue;
    mpz_class base = r.re().floor();
    for (mpz_class x = base - 1; x <= base + 2; ++x)
      if (f.eval(mpq_class(x)) == 0 && std::find(out.begin(), out.end(), x) == out.end())
        out.push_back(x);
  }
  return out;
}

void square_divisors(const Factorization& fac, size_t i, const mpz_class& acc,
                     std::vector<mpz_class>& out) {
  if (i == fac.size()) {
    out.push_back(acc);
    return;
  }
  mpz_class d = acc;
  for (int e = 0; 2 * e <= fac[i].second; ++e) {
    square_divisors(fac, i + 1, d, out);
    d *= fac[i].first;
  }
}

}  // namespace

TorsionGroup torsion_subgroup(const CurveQ& E) {
  MinimalModel mm = minimal_model(E);
  const CurveQ& M = mm.curve;
  const mpz_class A = -27 * M.c4().get_num(), B = -54 * M.c6().get_num();
  const CurveQ S(0, 0, 0, A, B);
  // (X, Y) on S  <->  X = 36 x + 3 b2, Y = 108 (2 y + a1 x + a3) on M
  auto to_M = [&](const mpz_class& X, const mpz_class& Y) {
    mpq_class x = (mpq_class(X) - 3 * M.b2()) / 36;
    mpq_class y = (mpq_class(Y) / 108 - M.a1() * x - M.a3()) / 2;
    return Point::affine(x, y);
  };

  mpz_class D = 4 * A * A * A + 27 * B * B;
  std::vector<mpz_class> ys{0};
  square_divisors(factorize(D), 0, 1, ys);

  std::vector<Point> found{Point::infinity()};
  long two_torsion = 0;
  std::set<std::pair<mpz_class, mpz_class>> seen;
  for (const auto& y : ys) {
    IntPoly f(std::vector<mpz_class>{B - y * y, A, 0, 1});
    for (const auto& X : integer_roots(f)) {
      for (int sgn : {1, -1}) {
        mpz_class Y = sgn * y;
        if (!seen.insert({X, Y}).second) continue;
        Point P = Point::affine(X, Y);
        if (point_order(S, P) == 0) continue;
        if (Y == 0) ++two_torsion;
        found.push_back(mm.iso.unmap_point(to_M(X, Y)));
      }
    }
  }

  TorsionGroup T;
  T.points = found;
  const long n = static_cast<long>(found.size());
  if (n == 1) return T;
  auto order_of = [&](const Point& P) { return point_order(E, P); };
  if (two_torsion == 3) {
    T.invariants = {2, n / 2};
    Point P;
    for (const auto& Q : found)
      if (order_of(Q) == n / 2) {
        P = Q;
        break;
      }
    std::vector<Point> sub;
    Point acc = Point::infinity();
    for (long k = 0; k < n / 2; ++k) {
      sub.push_back(acc);
      acc = point_add(E, acc, P);
    }
    for (const auto& Q : found)
      if (order_of(Q) == 2 && std::find(sub.begin(), sub.end(), Q) == sub.end()) {
        T.generators = {Q, P};
        break;
      }
    if (n / 2 == 2) {
      // (Z/2)^2: report the two 2-torsion generators in the order found
      T.generators.clear();
      for (const auto& Q : found)
        if (!Q.inf && T.generators.size() < 2) T.generators.push_back(Q);
    }
  } else {
    T.invariants = {n};
    for (const auto& Q : found)
      if (order_of(Q) == n) {
        T.generators = {Q};
        break;
      }
  }
  if (T.generators.empty()) throw InternalError("torsion group structure");
  return T;
}

}  // namespace cmrel
