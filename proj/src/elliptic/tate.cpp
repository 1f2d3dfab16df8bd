#include "cmrel/elliptic/tate.hpp"

#include <array>
#include <map>

#include "cmrel/error.hpp"
#include "cmrel/numerics/factor.hpp"
#include "cmrel/numerics/poly.hpp"

namespace cmrel {

namespace {

using Z = mpz_class;
using Ainv = std::array<Z, 5>;

struct Binv {
  Z b2, b4, b6, b8, c4, c6, disc;
};

Binv binv(const Ainv& a) {
  Binv r;
  r.b2 = a[0] * a[0] + 4 * a[1];
  r.b4 = 2 * a[3] + a[0] * a[2];
  r.b6 = a[2] * a[2] + 4 * a[4];
  r.b8 = a[0] * a[0] * a[4] + 4 * a[1] * a[4] - a[0] * a[2] * a[3] + a[1] * a[2] * a[2] - a[3] * a[3];
  r.c4 = r.b2 * r.b2 - 24 * r.b4;
  r.c6 = -r.b2 * r.b2 * r.b2 + 36 * r.b2 * r.b4 - 216 * r.b6;
  r.disc = -r.b2 * r.b2 * r.b8 - 8 * r.b4 * r.b4 * r.b4 - 27 * r.b6 * r.b6 + 9 * r.b2 * r.b4 * r.b6;
  return r;
}

void rst(Ainv& a, const Z& r, const Z& s, const Z& t) {
  Z a1 = a[0], a2 = a[1], a3 = a[2], a4 = a[3], a6 = a[4];
  a[0] = a1 + 2 * s;
  a[1] = a2 - s * a1 + 3 * r - s * s;
  a[2] = a3 + r * a1 + 2 * t;
  a[3] = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
  a[4] = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
}

struct Local {
  Z p;
  int v(const Z& x) const { return x == 0 ? 1 << 20 : valuation(x, p); }
  bool div(const Z& x) const { return x % p == 0; }
  Z red(const Z& x) const {
    Z r = x % p;
    if (r < 0) r += p;
    return r;
  }
  Z inv(const Z& x) const {
    Z r, xr = red(x);
    if (mpz_invert(r.get_mpz_t(), xr.get_mpz_t(), p.get_mpz_t()) == 0)
      throw InternalError("non-invertible residue in Tate's algorithm");
    return r;
  }
  // a root of X^e = x mod p (p in {2, 3})
  Z root(const Z& x, int e) const {
    Z xr = red(x);
    for (Z y = 0; y < p; ++y) {
      Z pw = 1;
      for (int i = 0; i < e; ++i) pw *= y;
      if (red(pw) == xr) return y;
    }
    throw InternalError("no root mod p in Tate's algorithm");
  }
  bool quad_roots(const Z& a_in, const Z& b_in, const Z& c_in) const {
    Z a = red(a_in), b = red(b_in), c = red(c_in);
    if (a == 0) return b != 0 || c == 0;
    if (p == 2) {
      for (int x = 0; x < 2; ++x)
        if (red(a * x * x + b * x + c) == 0) return true;
      return false;
    }
    Z d = red(b * b - 4 * a * c);
    return d == 0 || mpz_legendre(d.get_mpz_t(), p.get_mpz_t()) == 1;
  }
  int cubic_roots(const Z& b, const Z& c, const Z& d) const {
    if (p < 1000) {
      int n = 0;
      for (Z x = 0; x < p; ++x)
        if (red(((x + b) * x + c) * x + d) == 0) ++n;
      return n;
    }
    IntPoly f(std::vector<Z>{red(d), red(c), red(b), 1});
    auto degs = factor_degrees_mod_p(f, p.get_ui());
    int n = 0;
    for (int k : degs) n += (k == 1);
    return n;
  }
};

// Tate's algorithm at p on an integral model; the model is replaced by one
// minimal at p (changes of coordinates have integral r, s, t).
LocalData tate(Ainv& a, long p_long) {
  Local L{Z(p_long)};
  const Z p = L.p, p2 = p * p, p3 = p2 * p, p4 = p3 * p;
  LocalData out;
  out.p = p_long;
  while (true) {
    Binv B = binv(a);
    int n = L.v(B.disc);
    out.disc_valuation = n;
    if (n == 0) {
      out.kodaira = "I0";
      out.conductor_exponent = 0;
      out.tamagawa = 1;
      out.reduction = Reduction::kGood;
      return out;
    }
    Z r, s, t;
    if (p == 2) {
      if (L.div(B.b2)) {
        r = L.root(a[3], 2);
        t = L.root(((r + a[1]) * r + a[3]) * r + a[4], 2);
      } else {
        Z ti = L.inv(a[0]);
        r = ti * a[2];
        t = ti * (a[3] + r * r);
      }
    } else if (p == 3) {
      if (L.div(B.b2)) r = L.root(-B.b6, 3);
      else r = -L.inv(B.b2) * B.b4;
      t = a[0] * r + a[2];
    } else {
      if (L.div(B.c4)) r = -L.inv(12) * B.b2;
      else r = -L.inv(12 * B.c4) * (B.c6 + B.b2 * B.c4);
      t = -L.inv(2) * (a[0] * r + a[2]);
    }
    r = L.red(r);
    t = L.red(t);
    rst(a, r, 0, t);
    B = binv(a);

    if (!L.div(B.c4)) {
      out.conductor_exponent = 1;
      out.kodaira = "I" + std::to_string(n);
      if (L.quad_roots(1, a[0], -a[1])) {
        out.reduction = Reduction::kSplitMultiplicative;
        out.tamagawa = n;
      } else {
        out.reduction = Reduction::kNonsplitMultiplicative;
        out.tamagawa = n % 2 == 0 ? 2 : 1;
      }
      return out;
    }
    out.reduction = Reduction::kAdditive;
    if (L.v(a[4]) < 2) {
      out.kodaira = "II";
      out.conductor_exponent = n;
      out.tamagawa = 1;
      return out;
    }
    if (L.v(B.b8) < 3) {
      out.kodaira = "III";
      out.conductor_exponent = n - 1;
      out.tamagawa = 2;
      return out;
    }
    if (L.v(B.b6) < 3) {
      out.kodaira = "IV";
      out.conductor_exponent = n - 2;
      out.tamagawa = L.quad_roots(1, a[2] / p, -a[4] / p2) ? 3 : 1;
      return out;
    }
    if (p == 2) {
      s = L.root(a[1], 2);
      t = p * L.root(a[4] / p2, 2);
    } else if (p == 3) {
      s = a[0];
      t = a[2];
    } else {
      s = -a[0] * L.inv(2);
      t = -a[2] * L.inv(2);
    }
    rst(a, 0, s, t);

    Z b = L.red(a[1] / p), c = L.red(a[3] / p2), d = L.red(a[4] / p3);
    Z w = 27 * d * d - b * b * c * c + 4 * b * b * b * d - 18 * b * c * d + 4 * c * c * c;
    Z x = 3 * c - b * b;
    int sw = L.div(w) ? (L.div(x) ? 3 : 2) : 1;
    if (sw == 1) {
      out.kodaira = "I0*";
      out.tamagawa = 1 + L.cubic_roots(b, c, d);
      out.conductor_exponent = n - 4;
      return out;
    }
    if (sw == 2) {
      if (p == 2) r = L.root(c, 2);
      else if (p == 3) r = c * L.inv(b);
      else r = (b * c - 9 * d) * L.inv(2 * x);
      r = p * L.red(r);
      rst(a, r, 0, 0);
      int ix = 3, iy = 3;
      Z mx = p2, my = p2;
      while (true) {
        Z a2t = L.red(a[1] / p), a3t = L.red(a[2] / my), a4t = L.red(a[3] / (p * mx)),
          a6t = L.red(a[4] / (mx * my));
        if (L.div(a3t * a3t + 4 * a6t)) {
          t = p == 2 ? Z(my * L.root(a6t, 2)) : Z(my * L.red(-a3t * L.inv(2)));
          rst(a, 0, 0, t);
          my *= p;
          ++iy;
          a2t = L.red(a[1] / p);
          a3t = L.red(a[2] / my);
          a4t = L.red(a[3] / (p * mx));
          a6t = L.red(a[4] / (mx * my));
          if (L.div(a4t * a4t - 4 * a6t * a2t)) {
            r = p == 2 ? Z(mx * L.root(a6t * L.inv(a2t), 2)) : Z(mx * L.red(-a4t * L.inv(2 * a2t)));
            rst(a, r, 0, 0);
            mx *= p;
            ++ix;
          } else {
            out.tamagawa = L.quad_roots(a2t, a4t, a6t) ? 4 : 2;
            break;
          }
        } else {
          out.tamagawa = L.quad_roots(1, a3t, -a6t) ? 4 : 2;
          break;
        }
      }
      out.kodaira = "I" + std::to_string(ix + iy - 5) + "*";
      out.conductor_exponent = n - ix - iy + 1;
      return out;
    }
    // triple root
    if (p == 2) r = b;
    else if (p == 3) r = L.root(-d, 3);
    else r = -b * L.inv(3);
    r = p * L.red(r);
    rst(a, r, 0, 0);
    Z a3t = L.red(a[2] / p2), a6t = L.red(a[4] / p4);
    if (!L.div(a3t * a3t + 4 * a6t)) {
      out.kodaira = "IV*";
      out.tamagawa = L.quad_roots(1, a3t, -a6t) ? 3 : 1;
      out.conductor_exponent = n - 6;
      return out;
    }
    t = p == 2 ? Z(-p2 * L.root(a6t, 2)) : Z(p2 * L.red(-a3t * L.inv(2)));
    rst(a, 0, 0, t);
    if (L.v(a[3]) < 4) {
      out.kodaira = "III*";
      out.conductor_exponent = n - 7;
      out.tamagawa = 2;
      return out;
    }
    if (L.v(a[4]) < 6) {
      out.kodaira = "II*";
      out.conductor_exponent = n - 8;
      out.tamagawa = 1;
      return out;
    }
    // not minimal: scale by p and start over
    for (int i = 0; i < 5; ++i) {
      int e = i == 4 ? 6 : i + 1;
      Z q = 1;
      for (int k = 0; k < e; ++k) q *= p;
      a[i] /= q;
    }
  }
}

struct Minimal {
  Ainv a;
  Iso iso;
  std::vector<LocalData> local;
};

Iso iso_from_models(const CurveQ& from, const Ainv& to);

Minimal compute_minimal(const CurveQ& E) {
  // integral model: x = x'/u^2 with u^w a_w integral for every weight w
  std::map<Z, int> need;
  for (int i = 0; i < 5; ++i) {
    int w = i == 4 ? 6 : i + 1;
    const Z& den = E.ainvs()[i].get_den();
    if (den == 1) continue;
    for (const auto& [q, e] : factorize(den)) need[q] = std::max(need[q], (e + w - 1) / w);
  }
  Z u = 1;
  for (const auto& [q, k] : need)
    for (int j = 0; j < k; ++j) u *= q;
  Iso total;
  total.u = mpq_class(1, 1) / mpq_class(u);
  CurveQ Ei = total.apply(E);
  Ainv a;
  for (int i = 0; i < 5; ++i) a[i] = Ei.ainvs()[i].get_num();

  Minimal m;
  Binv B = binv(a);
  for (const auto& [q, e] : factorize(B.disc)) {
    (void)e;
    if (!q.fits_slong_p()) throw InvalidInput("discriminant prime too large");
    m.local.push_back(tate(a, q.get_si()));
  }
  // normalize a1, a3 in {0,1}, a2 in {-1,0,1}
  Z s = (a[0] % 2 == 0 ? Z(0) : Z(1));
  s = (s - a[0]) / 2;
  rst(a, 0, s, 0);
  Z r;
  {
    Z a2 = a[1];
    // r = -round(a2 / 3)
    Z q3 = a2 / 3, rem = a2 - 3 * q3;
    if (rem > 1) q3 += 1;
    if (rem < -1) q3 -= 1;
    r = -q3;
  }
  rst(a, r, 0, 0);
  Z t = (a[2] % 2 == 0 ? Z(0) : Z(1));
  t = (t - a[2]) / 2;
  rst(a, 0, 0, t);

  m.a = a;
  m.iso = iso_from_models(E, a);
  return m;
}

// The isomorphism from E onto the model `to`: u from the discriminants, then
// s, r, t from a1, a2, a3.
Iso iso_from_models(const CurveQ& from, const Ainv& to) {
  mpq_class ratio = from.disc() / mpq_class(binv(to).disc);  // u^12
  mpz_class num = ratio.get_num(), den = ratio.get_den();
  mpz_class rn, rd;
  if (num <= 0 || !mpz_root(rn.get_mpz_t(), num.get_mpz_t(), 12) ||
      !mpz_root(rd.get_mpz_t(), den.get_mpz_t(), 12))
    throw InternalError("minimal model is not isomorphic to the input");
  Iso iso;
  iso.u = mpq_class(rn, rd);
  iso.u.canonicalize();
  const mpq_class& U = iso.u;
  iso.s = (mpq_class(to[0]) * U - from.a1()) / 2;
  iso.r = (mpq_class(to[1]) * U * U - from.a2() + iso.s * from.a1() + iso.s * iso.s) / 3;
  iso.t = (mpq_class(to[2]) * U * U * U - from.a3() - iso.r * from.a1()) / 2;
  CurveQ check = iso.apply(from);
  for (int i = 0; i < 5; ++i)
    if (check.ainvs()[i] != mpq_class(to[i])) throw InternalError("minimal model mismatch");
  return iso;
}

}  // namespace

MinimalModel minimal_model(const CurveQ& E) {
  Minimal m = compute_minimal(E);
  return {CurveQ(m.a[0], m.a[1], m.a[2], m.a[3], m.a[4]), m.iso};
}

std::vector<LocalData> local_data(const CurveQ& E) {
  Minimal m = compute_minimal(E);
  // rerun on the minimal model so every entry reports minimal data
  Ainv a = m.a;
  std::vector<LocalData> out;
  for (const auto& [q, e] : factorize(binv(a).disc)) {
    (void)e;
    Ainv b = a;
    out.push_back(tate(b, q.get_si()));
  }
  return out;
}

LocalData local_data_at(const CurveQ& E, long p) {
  for (const auto& ld : local_data(E))
    if (ld.p == p) return ld;
  LocalData good;
  good.p = p;
  good.kodaira = "I0";
  return good;
}

mpz_class conductor(const CurveQ& E) {
  mpz_class N = 1;
  for (const auto& ld : local_data(E))
    for (int i = 0; i < ld.conductor_exponent; ++i) N *= ld.p;
  return N;
}

namespace {

long count_on_minimal(const CurveQ& M, long p) {
  std::array<long, 5> a;
  for (int i = 0; i < 5; ++i) {
    mpz_class r = M.ainvs()[i].get_num() % p;
    if (r < 0) r += p;
    a[i] = r.get_si();
  }
  if (p <= 3) {
    long n = 1;
    for (long x = 0; x < p; ++x)
      for (long y = 0; y < p; ++y) {
        long lhs = (y * y + a[0] * x * y + a[2] * y) % p;
        long rhs = (x * x * x + a[1] * x * x + a[3] * x + a[4]) % p;
        if ((lhs - rhs) % p == 0) ++n;
      }
    return n;
  }
  // y^2 = x^3 - 27 c4 x - 54 c6 is isomorphic over F_p for p >= 5
  mpz_class A = mpz_class(-27) * M.c4().get_num(), Bc = mpz_class(-54) * M.c6().get_num();
  A %= p;
  Bc %= p;
  if (A < 0) A += p;
  if (Bc < 0) Bc += p;
  const __int128 P = p;
  const __int128 aa = A.get_si(), bb = Bc.get_si();
  std::vector<signed char> chi(static_cast<size_t>(p), -1);
  chi[0] = 0;
  for (long y = 1; y < p; ++y) chi[static_cast<size_t>((static_cast<__int128>(y) * y) % P)] = 1;
  long n = p + 1;
  for (long x = 0; x < p; ++x) {
    __int128 X = x;
    __int128 v = ((X * X % P) * X + aa * X + bb) % P;
    n += chi[static_cast<size_t>(v)];
  }
  return n;
}

}  // namespace

long count_points_mod_p(const CurveQ& E, long p) {
  if (!is_prime(p)) throw InvalidInput("p must be prime");
  return count_on_minimal(minimal_model(E).curve, p);
}

long ap(const CurveQ& E, long p) { return p + 1 - count_points_mod_p(E, p); }

std::vector<std::pair<long, long>> ap_up_to(const CurveQ& E, long bound) {
  CurveQ M = minimal_model(E).curve;
  std::vector<std::pair<long, long>> out;
  for (long p : primes_up_to(bound)) out.emplace_back(p, p + 1 - count_on_minimal(M, p));
  return out;
}

}  // namespace cmrel
