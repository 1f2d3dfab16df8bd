#include "cmrel/elliptic/curve.hpp"

#include <sstream>
#include <vector>

#include "cmrel/error.hpp"

namespace cmrel {

CurveQ::CurveQ(mpq_class a1, mpq_class a2, mpq_class a3, mpq_class a4, mpq_class a6)
    : a_{std::move(a1), std::move(a2), std::move(a3), std::move(a4), std::move(a6)} {
  const auto& [A1, A2, A3, A4, A6] = a_;
  b2_ = A1 * A1 + 4 * A2;
  b4_ = 2 * A4 + A1 * A3;
  b6_ = A3 * A3 + 4 * A6;
  b8_ = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
  c4_ = b2_ * b2_ - 24 * b4_;
  c6_ = -b2_ * b2_ * b2_ + 36 * b2_ * b4_ - 216 * b6_;
  disc_ = -b2_ * b2_ * b8_ - 8 * b4_ * b4_ * b4_ - 27 * b6_ * b6_ + 9 * b2_ * b4_ * b6_;
  if (disc_ == 0) throw InvalidInput("singular curve");
  j_ = c4_ * c4_ * c4_ / disc_;
}

CurveQ CurveQ::from_longs(long a1, long a2, long a3, long a4, long a6) {
  return CurveQ(a1, a2, a3, a4, a6);
}

CurveQ CurveQ::parse(const std::string& s_in) {
  std::string s;
  for (char ch : s_in)
    if (ch != '[' && ch != ']' && ch != ' ') s += ch;
  std::vector<mpq_class> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      mpq_class q(item);
      q.canonicalize();
      v.push_back(q);
    } catch (const std::exception&) {
      throw InvalidInput("malformed curve coefficients");
    }
  }
  if (v.size() != 5) throw InvalidInput("malformed curve coefficients");
  return CurveQ(v[0], v[1], v[2], v[3], v[4]);
}

bool CurveQ::is_integral() const {
  for (const auto& a : a_)
    if (a.get_den() != 1) return false;
  return true;
}

std::string CurveQ::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < 5; ++i) os << (i ? "," : "") << a_[i].get_str();
  os << "]";
  return os.str();
}

std::string Point::to_string() const {
  if (inf) return "O";
  return "(" + x.get_str() + "," + y.get_str() + ")";
}

bool on_curve(const CurveQ& E, const Point& P) {
  if (P.inf) return true;
  const mpq_class &x = P.x, &y = P.y;
  return y * y + E.a1() * x * y + E.a3() * y ==
         x * x * x + E.a2() * x * x + E.a4() * x + E.a6();
}

namespace {
void require_on(const CurveQ& E, const Point& P) {
  if (!on_curve(E, P)) throw InvalidInput("point not on curve");
}

Point add_unchecked(const CurveQ& E, const Point& P, const Point& Q) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  mpq_class lambda, nu;
  if (P.x == Q.x) {
    if (P.y + Q.y + E.a1() * Q.x + E.a3() == 0) return Point::infinity();
    mpq_class num = 3 * P.x * P.x + 2 * E.a2() * P.x + E.a4() - E.a1() * P.y;
    mpq_class den = 2 * P.y + E.a1() * P.x + E.a3();
    lambda = num / den;
  } else {
    lambda = (Q.y - P.y) / (Q.x - P.x);
  }
  nu = P.y - lambda * P.x;
  mpq_class x3 = lambda * lambda + E.a1() * lambda - E.a2() - P.x - Q.x;
  mpq_class y3 = -(lambda + E.a1()) * x3 - nu - E.a3();
  return Point::affine(x3, y3);
}
}  // namespace

Point point_neg(const CurveQ& E, const Point& P) {
  require_on(E, P);
  if (P.inf) return P;
  return Point::affine(P.x, -P.y - E.a1() * P.x - E.a3());
}

Point point_add(const CurveQ& E, const Point& P, const Point& Q) {
  require_on(E, P);
  require_on(E, Q);
  return add_unchecked(E, P, Q);
}

Point point_sub(const CurveQ& E, const Point& P, const Point& Q) {
  return point_add(E, P, point_neg(E, Q));
}

Point point_mul(const CurveQ& E, const Point& P, const mpz_class& k) {
  require_on(E, P);
  Point base = k < 0 ? point_neg(E, P) : P;
  mpz_class n = abs(k);
  Point acc = Point::infinity();
  for (long i = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) - 1; i >= 0; --i) {
    acc = add_unchecked(E, acc, acc);
    if (mpz_tstbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) acc = add_unchecked(E, acc, base);
  }
  return acc;
}

CurveQ Iso::apply(const CurveQ& E) const {
  const mpq_class &a1 = E.a1(), &a2 = E.a2(), &a3 = E.a3(), &a4 = E.a4(), &a6 = E.a6();
  mpq_class u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;
  return CurveQ((a1 + 2 * s) / u, (a2 - s * a1 + 3 * r - s * s) / u2,
                (a3 + r * a1 + 2 * t) / u3,
                (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u4,
                (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / u6);
}

Point Iso::map_point(const Point& P) const {
  if (P.inf) return P;
  mpq_class u2 = u * u;
  mpq_class xp = (P.x - r) / u2;
  mpq_class yp = (P.y - s * u2 * xp - t) / (u2 * u);
  return Point::affine(xp, yp);
}

Point Iso::unmap_point(const Point& P) const {
  if (P.inf) return P;
  mpq_class u2 = u * u;
  return Point::affine(u2 * P.x + r, u2 * u * P.y + s * u2 * P.x + t);
}

Iso Iso::then(const Iso& n) const {
  // x = u^2 x' + r, x' = U^2 x'' + R  =>  x = (uU)^2 x'' + u^2 R + r
  // y = u^3 y' + s u^2 x' + t, y' = U^3 y'' + S U^2 x'' + T
  Iso c;
  c.u = u * n.u;
  c.r = u * u * n.r + r;
  c.s = s + u * n.s;
  c.t = t + u * u * s * n.r + u * u * u * n.t;
  return c;
}

}  // namespace cmrel
