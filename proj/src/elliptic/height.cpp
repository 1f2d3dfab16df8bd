#include "cmrel/elliptic/height.hpp"

#include <set>

#include "cmrel/elliptic/analytic.hpp"
#include "cmrel/elliptic/tate.hpp"
#include "cmrel/elliptic/torsion.hpp"
#include "cmrel/error.hpp"
#include "cmrel/numerics/factor.hpp"

namespace cmrel {

namespace {

constexpr int kInfVal = 1 << 28;

int val(const mpq_class& q, const mpz_class& p) { return q == 0 ? kInfVal : valuation(q, p); }

// Local height at p divided by log p, on a minimal model with p-integral
// discriminant valuation N.
mpq_class local_height_over_log(const CurveQ& E, const Point& P, const mpz_class& p) {
  const int N = valuation(E.disc(), p);
  const int vx = val(P.x, p);
  if (vx < 0) return mpq_class(-vx, 2) + mpq_class(N, 12);
  const mpq_class& x = P.x;
  const mpq_class& y = P.y;
  mpq_class psi2 = 2 * y + E.a1() * x + E.a3();
  mpq_class fx = 3 * x * x + 2 * E.a2() * x + E.a4() - E.a1() * y;
  if (N == 0 || val(psi2, p) <= 0 || val(fx, p) <= 0) return mpq_class(N, 12);
  if (val(E.c4(), p) == 0) {
    mpq_class a = std::min(mpq_class(val(psi2, p)), mpq_class(N, 2));
    return mpq_class(N, 12) - a * (N - a) / (2 * N);
  }
  mpq_class psi3 = 3 * x * x * x * x + E.b2() * x * x * x + 3 * E.b4() * x * x + 3 * E.b6() * x + E.b8();
  const int v2 = val(psi2, p), v3 = val(psi3, p);
  if (static_cast<long>(v3) >= 3L * v2) return mpq_class(N, 12) - mpq_class(v2, 3);
  return mpq_class(N, 12) - mpq_class(v3, 8);
}

HeightValue height_at(const CurveQ& Em, const Point& Q, Prec prec) {
  Lattice2 L = periods(Em, prec + 16);
  PrecComplex z = elliptic_log(Em, L, Q);
  auto [lam, err] = archimedean_local_height(L, z);

  std::set<mpz_class> primes;
  for (const auto& [p, e] : factorize(Em.disc().get_num())) primes.insert(p);
  if (Q.x.get_den() != 1)
    for (const auto& [p, e] : factorize(Q.x.get_den())) primes.insert(p);
  Real total = lam.with_prec(prec + 16);
  for (const auto& p : primes) {
    mpq_class c = local_height_over_log(Em, Q, p);
    if (c != 0) total += Real(c, prec + 16) * log(Real(p, prec + 16));
  }
  total = total * 2;
  Mag e = err.mul_2si(1) + Mag::from_real_upper(total).mul_2si(8 - static_cast<long>(prec));
  return {total.with_prec(prec), e};
}

}  // namespace

Real naive_height(const mpq_class& x, Prec prec) {
  mpz_class n = abs(x.get_num());
  const mpz_class& d = x.get_den();
  return log(Real(n > d ? n : d, prec));
}

HeightValue canonical_height(const CurveQ& E, const Point& P, Prec prec) {
  if (!on_curve(E, P)) throw InvalidInput("point not on curve");
  if (P.inf || point_order(E, P) > 0) return {Real(0, prec), Mag::pow2(-static_cast<long>(prec))};
  MinimalModel mm = minimal_model(E);
  Point Q = mm.iso.map_point(P);
  const Mag target = Mag::pow2(-static_cast<long>(prec) / 2);
  Prec p = prec;
  for (int attempt = 0; attempt < 5; ++attempt, p *= 2) {
    try {
      HeightValue h = height_at(mm.curve, Q, p);
      if (h.err <= target || attempt == 4) return h;
    } catch (const Indeterminate&) {
      if (attempt == 4) throw;
    }
  }
  throw Indeterminate("indeterminate at current precision");
}

double canonical_height_doubling(const CurveQ& E, const Point& P, int k) {
  Point Q = P;
  for (int i = 0; i < k; ++i) {
    Q = point_add(E, Q, Q);
    if (Q.inf) return 0.0;
  }
  Real h = naive_height(Q.x, 128);
  return mul_2si(h, -2L * k).to_double();
}

std::vector<Point> search_points(const CurveQ& E, long bound) {
  std::vector<Point> out;
  for (long d = 1; d * d <= bound; ++d) {
    for (long n = -bound; n <= bound; ++n) {
      if (gcd_long(n, d) != 1) continue;
      mpq_class x(n, d * d);
      x.canonicalize();
      mpq_class b = E.a1() * x + E.a3();
      mpq_class f = ((x + E.a2()) * x + E.a4()) * x + E.a6();
      mpq_class disc = b * b + 4 * f;
      if (disc < 0) continue;
      mpz_class rn, rd;
      if (!mpz_perfect_square_p(disc.get_num().get_mpz_t()) ||
          !mpz_perfect_square_p(disc.get_den().get_mpz_t()))
        continue;
      mpz_sqrt(rn.get_mpz_t(), disc.get_num().get_mpz_t());
      mpz_sqrt(rd.get_mpz_t(), disc.get_den().get_mpz_t());
      mpq_class r(rn, rd);
      r.canonicalize();
      out.push_back(Point::affine(x, (-b + r) / 2));
      if (r != 0) out.push_back(Point::affine(x, (-b - r) / 2));
    }
  }
  return out;
}

std::optional<HeightValue> empirical_eta(const CurveQ& E, long bound, Prec prec) {
  if (bound < 1) throw InvalidInput("search bound must be positive");
  std::optional<HeightValue> best;
  for (const Point& P : search_points(E, bound)) {
    if (point_order(E, P) > 0) continue;
    HeightValue h = canonical_height(E, P, prec);
    if (!best || h.value < best->value) best = h;
  }
  return best;
}

}  // namespace cmrel
