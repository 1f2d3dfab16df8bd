#include "cmrel/numerics/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>

#include "cmrel/error.hpp"

namespace cmrel {

IntPoly::IntPoly(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { trim(); }

IntPoly IntPoly::from_longs(const std::vector<long>& coeffs) {
  std::vector<mpz_class> c;
  c.reserve(coeffs.size());
  for (long v : coeffs) c.emplace_back(v);
  return IntPoly(std::move(c));
}

IntPoly IntPoly::x_minus(const mpz_class& a) { return IntPoly({-a, mpz_class(1)}); }

void IntPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

const mpz_class& IntPoly::coeff(int i) const {
  static const mpz_class zero = 0;
  if (i < 0 || i > degree()) return zero;
  return c_[static_cast<size_t>(i)];
}

mpq_class IntPoly::eval(const mpq_class& x) const {
  mpq_class r = 0;
  for (size_t i = c_.size(); i-- > 0;) r = r * x + c_[i];
  return r;
}

Complex IntPoly::eval(const Complex& z) const {
  Prec p = z.prec();
  Complex r(p);
  for (size_t i = c_.size(); i-- > 0;) {
    r *= z;
    r.re += Real(c_[i], p);
  }
  return r;
}

PrecComplex IntPoly::eval(const PrecComplex& z) const {
  Prec p = z.prec();
  PrecComplex r(p);
  for (size_t i = c_.size(); i-- > 0;) {
    r *= z;
    r += PrecComplex::rational(c_[i], 0, p);
  }
  return r;
}

IntPoly IntPoly::derivative() const {
  std::vector<mpz_class> d;
  for (size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<unsigned long>(i));
  return IntPoly(std::move(d));
}

mpz_class IntPoly::content() const {
  mpz_class g = 0;
  for (const auto& x : c_) g = gcd(g, x);
  return g;
}

IntPoly IntPoly::primitive_part() const {
  if (c_.empty()) return *this;
  mpz_class g = content();
  if (c_.back() < 0) g = -g;
  std::vector<mpz_class> r = c_;
  for (auto& x : r) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return IntPoly(std::move(r));
}

IntPoly IntPoly::operator*(const IntPoly& o) const {
  if (c_.empty() || o.c_.empty()) return IntPoly();
  std::vector<mpz_class> r(c_.size() + o.c_.size() - 1);
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return IntPoly(std::move(r));
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
  std::vector<mpz_class> r(std::max(c_.size(), o.c_.size()));
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return IntPoly(std::move(r));
}

IntPoly IntPoly::operator-(const IntPoly& o) const {
  std::vector<mpz_class> r(std::max(c_.size(), o.c_.size()));
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
  return IntPoly(std::move(r));
}

std::string IntPoly::to_string(const std::string& var) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const mpz_class& c = c_[static_cast<size_t>(i)];
    if (c == 0) continue;
    mpz_class a = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (i == 0) {
      os << a.get_str();
      continue;
    }
    if (a != 1) os << a.get_str() << "*";
    os << var;
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

// ---------------------------------------------------------------- roots

namespace {

double log2_abs(const Complex& z) {
  if (z.is_zero()) return -1e300;
  Real a = abs(z);
  long e = a.exponent();
  Real m = mul_2si(a, -e);
  return static_cast<double>(e) + std::log2(m.to_double());
}

// Initial radii from the upper convex hull of (i, log|c_i|).
std::vector<double> newton_polygon_radii(const std::vector<Complex>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> lg(c.size());
  for (size_t i = 0; i < c.size(); ++i) lg[i] = log2_abs(c[i]);
  std::vector<int> hull;
  for (int i = 0; i <= n; ++i) {
    if (lg[static_cast<size_t>(i)] < -1e299) continue;
    while (hull.size() >= 2) {
      int a = hull[hull.size() - 2], b = hull.back();
      double cross = (lg[b] - lg[a]) * (i - a) - (lg[i] - lg[a]) * (b - a);
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<double> radii;
  for (size_t s = 0; s + 1 < hull.size(); ++s) {
    int a = hull[s], b = hull[s + 1];
    double r = (lg[a] - lg[b]) / (b - a);
    for (int k = a; k < b; ++k) radii.push_back(r);
  }
  return radii;  // log2 radii, one per root
}

std::vector<Complex> aberth(const std::vector<Complex>& c, std::vector<Complex> z, Prec prec,
                            int max_iter) {
  const size_t n = c.size() - 1;
  std::vector<Complex> dc(n);
  for (size_t i = 1; i <= n; ++i) dc[i - 1] = c[i] * Real(static_cast<long>(i), prec);
  auto horner = [&](const std::vector<Complex>& cc, const Complex& x) {
    Complex r(prec);
    for (size_t i = cc.size(); i-- > 0;) {
      r *= x;
      r += cc[i];
    }
    return r;
  };
  std::vector<bool> done(n, false);
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (size_t k = 0; k < n; ++k) {
      if (done[k]) continue;
      Complex pv = horner(c, z[k]);
      Complex dv = horner(dc, z[k]);
      if (dv.is_zero()) {
        z[k] += Complex::from_double(1e-3, 1e-3, prec);
        all = false;
        continue;
      }
      Complex w = pv / dv;
      Complex s(prec);
      for (size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        Complex diff = z[k] - z[j];
        if (diff.is_zero()) continue;
        s += Complex(Real(1, prec)) / diff;
      }
      Complex denom = Complex(Real(1, prec)) - w * s;
      Complex corr = denom.is_zero() ? w : w / denom;
      z[k] -= corr;
      long ez = z[k].is_zero() ? -static_cast<long>(prec) : abs(z[k]).exponent();
      if (corr.is_zero() || abs(corr).exponent() < ez - static_cast<long>(prec) + 8) {
        done[k] = true;
      } else {
        all = false;
      }
    }
    if (all) break;
  }
  return z;
}

}  // namespace

std::vector<PrecComplex> complex_roots(const std::vector<PrecComplex>& coeffs, Prec prec) {
  std::vector<PrecComplex> cs = coeffs;
  while (!cs.empty() && cs.back().mid().is_zero()) cs.pop_back();
  if (cs.size() <= 1) return {};
  const size_t n = cs.size() - 1;
  if (cs.back().contains_zero()) throw Indeterminate("leading coefficient not bounded away from zero");

  // exact zero roots split off first
  size_t z0 = 0;
  while (cs[z0].mid().is_zero() && cs[z0].err().is_zero()) ++z0;
  if (z0 > 0) {
    std::vector<PrecComplex> rest(cs.begin() + static_cast<long>(z0), cs.end());
    std::vector<PrecComplex> out = complex_roots(rest, prec);
    for (size_t i = 0; i < z0; ++i) out.push_back(PrecComplex::exact(0, 0, prec));
    return out;
  }

  const Prec low = 128;
  std::vector<Complex> cl;
  for (const auto& c : cs) cl.push_back(c.mid().with_prec(low));
  std::vector<double> radii = newton_polygon_radii(cl);
  std::vector<Complex> z;
  for (size_t k = 0; k < n; ++k) {
    double ang = 2 * M_PI * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    Real r = mul_2si(Real::from_double(1.0, low), static_cast<long>(std::floor(radii[k])));
    r *= Real::from_double(std::exp2(radii[k] - std::floor(radii[k])), low);
    z.push_back(polar(r, Real::from_double(ang, low)));
  }
  z = aberth(cl, std::move(z), low, 2000);

  std::vector<Complex> ch;
  for (const auto& c : cs) ch.push_back(c.mid().with_prec(prec));
  for (auto& r : z) r = r.with_prec(prec);
  z = aberth(ch, std::move(z), prec, 200);

  std::vector<PrecComplex> deriv;
  for (size_t i = 1; i <= n; ++i) deriv.push_back(cs[i] * static_cast<long>(i));
  std::vector<PrecComplex> out;
  out.reserve(n);
  for (auto& r : z) {
    PrecComplex x(r);
    PrecComplex pv(prec), dv(prec);
    for (size_t i = cs.size(); i-- > 0;) {
      pv *= x;
      pv += cs[i];
    }
    for (size_t i = deriv.size(); i-- > 0;) {
      dv *= x;
      dv += deriv[i];
    }
    Mag lo = dv.abs_lower();
    Mag e = lo.is_zero() ? Mag::infinity()
                         : (pv.abs_upper() * Mag(static_cast<double>(n))).div_upper(lo);
    out.emplace_back(std::move(r), std::move(e));
  }
  return out;
}

std::vector<PrecComplex> complex_roots(const IntPoly& p, Prec prec) {
  std::vector<PrecComplex> cs;
  for (const auto& c : p.coeffs()) cs.push_back(PrecComplex::rational(c, 0, prec));
  return complex_roots(cs, prec);
}

std::vector<PrecComplex> poly_from_roots(const std::vector<PrecComplex>& roots) {
  Prec p = roots.empty() ? kDefaultPrec : roots.front().prec();
  std::vector<PrecComplex> c{PrecComplex::exact(1, 0, p)};
  for (const auto& r : roots) {
    std::vector<PrecComplex> next(c.size() + 1, PrecComplex(p));
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * r;
    }
    c = std::move(next);
  }
  return c;
}

std::optional<IntPoly> round_to_intpoly(const std::vector<PrecComplex>& coeffs) {
  std::vector<mpz_class> out;
  Mag quarter(0.25);
  for (const auto& c : coeffs) {
    mpz_class n = c.re().round();
    PrecComplex d = c - PrecComplex::rational(n, 0, c.prec());
    if (!(d.abs_upper() < quarter)) return std::nullopt;
    out.push_back(n);
  }
  return IntPoly(std::move(out));
}

// ---------------------------------------------------------------- mod p

namespace {

using u64 = std::uint64_t;
using Fp = std::vector<u64>;  // ascending, trimmed

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % p); }

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

void fp_trim(Fp& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Fp fp_mod(Fp a, const Fp& m, u64 p) {
  u64 inv = powmod(m.back(), p - 2, p);
  while (a.size() >= m.size()) {
    u64 q = mulmod(a.back(), inv, p);
    size_t shift = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + p - mulmod(q, m[i], p)) % p;
    fp_trim(a);
  }
  return a;
}

Fp fp_mul(const Fp& a, const Fp& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  Fp r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
  fp_trim(r);
  return r;
}

Fp fp_gcd(Fp a, Fp b, u64 p) {
  while (!b.empty()) {
    Fp r = fp_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    u64 inv = powmod(a.back(), p - 2, p);
    for (auto& x : a) x = mulmod(x, inv, p);
  }
  return a;
}

Fp fp_div(Fp a, const Fp& m, u64 p) {
  u64 inv = powmod(m.back(), p - 2, p);
  Fp q(a.size() >= m.size() ? a.size() - m.size() + 1 : 0, 0);
  while (a.size() >= m.size()) {
    u64 c = mulmod(a.back(), inv, p);
    size_t shift = a.size() - m.size();
    q[shift] = c;
    for (size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + p - mulmod(c, m[i], p)) % p;
    fp_trim(a);
  }
  return q;
}

Fp fp_powx(u64 e, const Fp& f, u64 p) {
  Fp result{1};
  Fp base{0, 1};
  base = fp_mod(base, f, p);
  while (e) {
    if (e & 1) result = fp_mod(fp_mul(result, base, p), f, p);
    base = fp_mod(fp_mul(base, base, p), f, p);
    e >>= 1;
  }
  return result;
}

Fp fp_pow_poly(const Fp& h, u64 e, const Fp& f, u64 p) {
  Fp result{1};
  Fp base = h;
  while (e) {
    if (e & 1) result = fp_mod(fp_mul(result, base, p), f, p);
    base = fp_mod(fp_mul(base, base, p), f, p);
    e >>= 1;
  }
  return result;
}

bool is_small_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

std::vector<int> factor_degrees_mod_p(const IntPoly& poly, unsigned long prime) {
  const u64 p = prime;
  Fp f;
  for (const auto& c : poly.coeffs()) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), c.get_mpz_t(), prime);
    f.push_back(r.get_ui());
  }
  if (f.empty() || f.back() == 0) return {};
  fp_trim(f);
  if (f.size() <= 1) return {};
  Fp df;
  for (size_t i = 1; i < f.size(); ++i) df.push_back(mulmod(f[i], i % p, p));
  fp_trim(df);
  if (df.empty() || fp_gcd(f, df, p).size() != 1) return {};

  std::vector<int> degs;
  Fp h = fp_powx(1, f, p);  // x mod f
  int i = 1;
  while (static_cast<int>(f.size()) - 1 >= 2 * i) {
    h = fp_pow_poly(h, p, f, p);
    Fp hx = h;
    if (hx.size() < 2) hx.resize(2, 0);
    hx[1] = (hx[1] + p - 1) % p;
    fp_trim(hx);
    Fp g = fp_gcd(f, hx, p);
    int dg = static_cast<int>(g.size()) - 1;
    if (dg > 0) {
      for (int k = 0; k < dg / i; ++k) degs.push_back(i);
      f = fp_div(f, g, p);
      h = fp_mod(h, f, p);
    }
    ++i;
  }
  if (f.size() > 1) degs.push_back(static_cast<int>(f.size()) - 1);
  std::sort(degs.begin(), degs.end());
  return degs;
}

std::set<int> possible_factor_degrees(const IntPoly& p, int nprimes) {
  const int n = p.degree();
  std::vector<char> allowed(static_cast<size_t>(n) + 1, 1);
  int used = 0;
  for (u64 q = 3; used < nprimes && q < 100000; q += 2) {
    if (!is_small_prime(q)) continue;
    std::vector<int> degs = factor_degrees_mod_p(p, q);
    if (degs.empty()) continue;
    ++used;
    std::vector<char> sums(static_cast<size_t>(n) + 1, 0);
    sums[0] = 1;
    for (int d : degs)
      for (int s = n; s >= d; --s)
        if (sums[static_cast<size_t>(s - d)]) sums[static_cast<size_t>(s)] = 1;
    for (int s = 0; s <= n; ++s) allowed[static_cast<size_t>(s)] &= sums[static_cast<size_t>(s)];
  }
  std::set<int> out;
  for (int s = 1; s < n; ++s)
    if (allowed[static_cast<size_t>(s)]) out.insert(s);
  return out;
}

Irreducibility irreducibility_filter(const IntPoly& p, int nprimes) {
  if (p.degree() <= 1) return Irreducibility::kIrreducible;
  if (p.content() != 1) return Irreducibility::kUnknown;
  return possible_factor_degrees(p, nprimes).empty() ? Irreducibility::kIrreducible
                                                     : Irreducibility::kUnknown;
}

namespace {

bool divides_exactly(const IntPoly& g, const IntPoly& f) {
  // f mod g over Q with g monic up to sign
  if (abs(g.leading()) != 1) return false;
  std::vector<mpz_class> r = f.coeffs();
  const int dg = g.degree();
  for (int i = static_cast<int>(r.size()) - 1; i >= dg; --i) {
    mpz_class q = r[static_cast<size_t>(i)] * g.leading();
    if (q == 0) continue;
    for (int j = 0; j <= dg; ++j) r[static_cast<size_t>(i - dg + j)] -= q * g.coeff(j);
  }
  for (int i = 0; i < dg; ++i)
    if (r[static_cast<size_t>(i)] != 0) return false;
  return true;
}

}  // namespace

std::optional<bool> certify_irreducible(const IntPoly& p, const std::vector<PrecComplex>& roots,
                                        long budget) {
  const int n = p.degree();
  if (n <= 1) return true;
  if (p.content() != 1) return false;
  if (static_cast<int>(roots.size()) != n) return std::nullopt;
  std::set<int> cand = possible_factor_degrees(p, 30);
  if (cand.empty()) return true;
  if (abs(p.leading()) != 1) return std::nullopt;

  // Group the roots into complex-conjugation orbits: a rational factor is a
  // union of orbits.
  struct Orbit {
    std::vector<size_t> idx;
    u64 frac;  // trace mod 1, 64-bit fixed point
  };
  std::vector<Orbit> orbits;
  std::vector<bool> used(roots.size(), false);
  const Prec prec = roots.front().prec();
  auto frac64 = [&](const Real& x) {
    Real f = x - Real(x.floor(), prec);
    Real s = mul_2si(f, 64);
    mpz_class z = s.floor();
    mpz_class m;
    mpz_fdiv_r_2exp(m.get_mpz_t(), z.get_mpz_t(), 64);
    return static_cast<u64>(mpz_get_ui(m.get_mpz_t()));
  };
  for (size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    Mag im = Mag::from_real_upper(roots[i].im());
    if (im <= roots[i].err()) {
      orbits.push_back({{i}, frac64(roots[i].re())});
      continue;
    }
    size_t best = roots.size();
    for (size_t j = 0; j < roots.size(); ++j) {
      if (used[j]) continue;
      PrecComplex d = roots[j] - PrecComplex(conj(roots[i].mid()), roots[i].err());
      if (d.contains_zero()) {
        best = j;
        break;
      }
    }
    if (best == roots.size()) return std::nullopt;
    used[best] = true;
    orbits.push_back({{i, best}, frac64(roots[i].re() * 2)});
  }

  // Tolerance in 64-bit fixed point: generous relative to the root radii.
  const u64 tol = u64(1) << 20;
  long nodes = 0;
  bool exhausted = false;
  bool reducible = false;
  std::vector<size_t> chosen;

  std::function<void(size_t, int, u64)> dfs = [&](size_t start, int remaining, u64 acc) {
    if (reducible || exhausted) return;
    if (++nodes > budget) {
      exhausted = true;
      return;
    }
    if (remaining == 0) {
      if (acc < tol || acc > ~tol) {
        std::vector<PrecComplex> sub;
        for (size_t o : chosen)
          for (size_t r : orbits[o].idx) sub.push_back(roots[r]);
        auto g = round_to_intpoly(poly_from_roots(sub));
        if (g && divides_exactly(*g, p)) reducible = true;
      }
      return;
    }
    for (size_t o = start; o < orbits.size(); ++o) {
      int w = static_cast<int>(orbits[o].idx.size());
      if (w > remaining) continue;
      chosen.push_back(o);
      dfs(o + 1, remaining - w, acc + orbits[o].frac);
      chosen.pop_back();
      if (reducible || exhausted) return;
    }
  };
  for (int k : cand) {
    if (2 * k > n) continue;
    dfs(0, k, 0);
    if (reducible) return false;
    if (exhausted) return std::nullopt;
  }
  return true;
}

// ---------------------------------------------------------------- BiPoly

BiPoly::BiPoly(int deg_x, int deg_y)
    : c_(static_cast<size_t>(deg_x) + 1, std::vector<mpz_class>(static_cast<size_t>(deg_y) + 1)) {}

PrecComplex BiPoly::eval(const PrecComplex& x, const PrecComplex& y) const {
  Prec p = std::max(x.prec(), y.prec());
  PrecComplex r(p);
  for (size_t i = c_.size(); i-- > 0;) {
    PrecComplex inner(p);
    for (size_t j = c_[i].size(); j-- > 0;) {
      inner *= y;
      if (c_[i][j] != 0) inner += PrecComplex::rational(c_[i][j], 0, p);
    }
    r *= x;
    r += inner;
  }
  return r;
}

mpq_class BiPoly::eval(const mpq_class& x, const mpq_class& y) const {
  mpq_class r = 0;
  for (size_t i = c_.size(); i-- > 0;) {
    mpq_class inner = 0;
    for (size_t j = c_[i].size(); j-- > 0;) inner = inner * y + c_[i][j];
    r = r * x + inner;
  }
  return r;
}

std::vector<PrecComplex> BiPoly::specialize_x(const PrecComplex& x0) const {
  Prec p = x0.prec();
  std::vector<PrecComplex> out(c_.empty() ? 0 : c_[0].size(), PrecComplex(p));
  for (size_t j = 0; j < out.size(); ++j) {
    PrecComplex acc(p);
    for (size_t i = c_.size(); i-- > 0;) {
      acc *= x0;
      if (c_[i][j] != 0) acc += PrecComplex::rational(c_[i][j], 0, p);
    }
    out[j] = std::move(acc);
  }
  return out;
}

IntPoly BiPoly::specialize_x(const mpz_class& x0) const {
  std::vector<mpz_class> out(c_.empty() ? 0 : c_[0].size());
  for (size_t j = 0; j < out.size(); ++j) {
    mpz_class acc = 0;
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x0 + c_[i][j];
    out[j] = acc;
  }
  return IntPoly(std::move(out));
}

bool BiPoly::is_symmetric() const {
  if (deg_x() != deg_y()) return false;
  for (int i = 0; i <= deg_x(); ++i)
    for (int j = 0; j < i; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

size_t BiPoly::max_coeff_bits() const {
  size_t m = 0;
  for (const auto& row : c_)
    for (const auto& v : row) m = std::max(m, mpz_sizeinbase(v.get_mpz_t(), 2));
  return m;
}

}  // namespace cmrel
