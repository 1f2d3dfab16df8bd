#include "cmrel/quadforms/quadforms.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "cmrel/cache.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modular/jfunction.hpp"
#include "json.hpp"

namespace cmrel {

bool is_valid_discriminant(long d) {
  long r = ((d % 4) + 4) % 4;
  return d < 0 && (r == 0 || r == 1);
}

Disc::Disc(long value) : value_(value) {
  if (!is_valid_discriminant(value)) throw InvalidInput("invalid discriminant");
}

std::pair<long, long> fundamental_part(long d) {
  long f = 1;
  long d0 = d;
  for (long p = 2; p * p <= -d0; ++p) {
    while (d0 % (p * p) == 0 && is_valid_discriminant(d0 / (p * p))) {
      d0 /= p * p;
      f *= p;
    }
  }
  return {d0, f};
}

// ---------------------------------------------------------------- Mobius

MobiusMap MobiusMap::operator*(const MobiusMap& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

MobiusMap MobiusMap::inverse() const { return {d, -b, -c, a}; }

PrecComplex MobiusMap::apply(const PrecComplex& tau) const {
  Prec p = tau.prec();
  if (c == 0) {
    PrecComplex num = tau * a + PrecComplex::exact(b, 0, p);
    return d == 1 ? num : num / d;
  }
  PrecComplex num = tau * a + PrecComplex::exact(b, 0, p);
  PrecComplex den = tau * c + PrecComplex::exact(d, 0, p);
  return num / den;
}

std::string MobiusMap::to_string() const {
  std::ostringstream os;
  os << "[[" << a << "," << b << "],[" << c << "," << d << "]]";
  return os.str();
}

// ---------------------------------------------------------------- forms

bool QuadForm::is_reduced() const {
  if (std::labs(b) > a || a > c) return false;
  if ((std::labs(b) == a || a == c) && b < 0) return false;
  return true;
}

bool QuadForm::is_primitive() const { return std::gcd(std::gcd(a, b), c) == 1; }

std::string QuadForm::to_string() const {
  std::ostringstream os;
  os << "(" << a << "," << b << "," << c << ")";
  return os.str();
}

QuadForm reduce_form(const QuadForm& f_in, MobiusMap* gamma) {
  QuadForm f = f_in;
  if (f.a <= 0 || f.disc() >= 0) throw InvalidInput("form is not positive definite");
  MobiusMap g = MobiusMap::identity();
  while (true) {
    // translate tau -> tau + k, b -> b - 2ka, into (-a, a]
    long twoa = 2 * f.a;
    long k = 0;
    if (f.b > f.a || f.b <= -f.a) {
      // k = ceil((b - a) / 2a)
      long num = f.b - f.a;
      k = num >= 0 ? (num + twoa - 1) / twoa : -((-num) / twoa);
      long nb = f.b - 2 * k * f.a;
      f.c = f.c - k * f.b + k * k * f.a;
      f.b = nb;
      g = MobiusMap::translation(k) * g;
    }
    if (f.a > f.c) {
      f = {f.c, -f.b, f.a};
      g = MobiusMap::inversion() * g;
      continue;
    }
    if (f.a == f.c && f.b < 0) {
      f.b = -f.b;
      g = MobiusMap::inversion() * g;
    }
    break;
  }
  if (gamma) *gamma = g;
  return f;
}

QuadForm transform_form(const QuadForm& f, const MobiusMap& g) {
  // tau' = g(tau) means tau = g^{-1}(tau') up to the determinant:
  // tau = (d tau' - b) / (-c tau' + a). Substitute into A tau^2 + B tau + C.
  __int128 A = f.a, B = f.b, C = f.c;
  __int128 p = g.d, q = -g.b, r = -g.c, s = g.a;  // tau = (p tau' + q) / (r tau' + s)
  __int128 na = A * p * p + B * p * r + C * r * r;
  __int128 nb = 2 * A * p * q + B * (p * s + q * r) + 2 * C * r * s;
  __int128 nc = A * q * q + B * q * s + C * s * s;
  auto g128 = [](__int128 x, __int128 y) {
    if (x < 0) x = -x;
    if (y < 0) y = -y;
    while (y) {
      __int128 t = x % y;
      x = y;
      y = t;
    }
    return x;
  };
  __int128 cont = g128(g128(na, nb), nc);
  na /= cont;
  nb /= cont;
  nc /= cont;
  if (na < 0) {
    na = -na;
    nb = -nb;
    nc = -nc;
  }
  const __int128 lim = static_cast<__int128>(1) << 62;
  if (na >= lim || nb >= lim || nb <= -lim || nc >= lim || nc <= -lim)
    throw InvalidInput("transformed form exceeds 64-bit range");
  return {static_cast<long>(na), static_cast<long>(nb), static_cast<long>(nc)};
}

TauPoint::TauPoint(const QuadForm& f) : form_(f) {
  if (f.a <= 0 || f.disc() >= 0) throw InvalidInput("form is not positive definite");
}

PrecComplex TauPoint::value(Prec prec) const {
  Real sq = sqrt(Real(-form_.disc(), prec));
  Complex mid(Real(-form_.b, prec) / (2 * form_.a), sq / (2 * form_.a));
  Mag e = rounding_err(mid).mul_2si(2);
  return PrecComplex(std::move(mid), std::move(e));
}

std::string TauPoint::to_string() const {
  std::ostringstream os;
  os << "(" << -form_.b << "+sqrt(" << form_.disc() << "))/" << 2 * form_.a;
  return os.str();
}

std::vector<QuadForm> reduced_forms(const Disc& d) {
  const long D = d.value();
  std::vector<QuadForm> out;
  for (long a = 1; 3 * a * a <= -D; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      if (((b - D) % 2) != 0) continue;
      long num = b * b - D;
      if (num % (4 * a) != 0) continue;
      long c = num / (4 * a);
      QuadForm f{a, b, c};
      if (!f.is_reduced() || !f.is_primitive()) continue;
      out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

long class_number(const Disc& d) { return static_cast<long>(reduced_forms(d).size()); }

long heegner_beta(const Disc& d, long N) {
  if (N < 1) throw InvalidInput("level must be positive");
  const long m = 4 * N;
  long D = ((d.value() % m) + m) % m;
  for (long beta = 0; beta < 2 * N; ++beta)
    if ((beta * beta) % m == D) return beta;
  return -1;
}

std::vector<QuadForm> heegner_forms(const Disc& d, long N) {
  long beta = heegner_beta(d, N);
  if (beta < 0) return {};
  std::vector<QuadForm> classes = reduced_forms(d);
  const size_t h = classes.size();
  std::vector<std::optional<QuadForm>> found(h);
  size_t nfound = 0;
  const long D = d.value();
  for (long k = 1; nfound < h && k <= 4 * (-D) + 4; ++k) {
    const long A = N * k;
    // B in (-A, A] with B = beta mod 2N
    long start = -A + 1;
    long off = ((beta - start) % (2 * N) + 2 * N) % (2 * N);
    for (long B = start + off; B <= A && nfound < h; B += 2 * N) {
      long num = B * B - D;
      if (num % (4 * A) != 0) continue;
      QuadForm f{A, B, num / (4 * A)};
      if (!f.is_primitive()) continue;
      QuadForm r = reduce_form(f);
      auto it = std::lower_bound(classes.begin(), classes.end(), r);
      if (it == classes.end() || !(*it == r)) continue;
      size_t idx = static_cast<size_t>(it - classes.begin());
      if (found[idx]) continue;
      found[idx] = f;
      ++nfound;
    }
  }
  std::vector<QuadForm> out;
  for (auto& f : found)
    if (f) out.push_back(*f);
  return out;
}

TauPoint tau_of_form(const QuadForm& f) {
  if (!f.is_primitive()) throw InvalidInput("form is not primitive");
  return TauPoint(f);
}

// ---------------------------------------------------------------- class polynomials

namespace {

std::optional<IntPoly> classpoly_from_cache(long D) {
  auto cache = persistent_cache();
  if (!cache) return std::nullopt;
  auto payload = cache->load("classpoly", std::to_string(D));
  if (!payload) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(*payload);
    std::vector<mpz_class> c;
    for (const auto& s : j.at("coeffs")) c.emplace_back(s.get<std::string>());
    return IntPoly(std::move(c));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void classpoly_to_cache(long D, const IntPoly& p) {
  auto cache = persistent_cache();
  if (!cache) return;
  nlohmann::json j;
  j["coeffs"] = nlohmann::json::array();
  for (const auto& c : p.coeffs()) j["coeffs"].push_back(c.get_str());
  cache->store("classpoly", std::to_string(D), j.dump());
}

}  // namespace

ClassPolyResult hilbert_class_poly_full(const Disc& d, Prec prec) {
  std::vector<QuadForm> forms = reduced_forms(d);
  // Coefficient size estimate from the dominant terms |j| ~ e^{pi sqrt|D| / a}.
  double bits = 0;
  for (const auto& f : forms)
    bits += M_PI * std::sqrt(static_cast<double>(-d.value())) / static_cast<double>(f.a) / M_LN2 + 11;
  Prec p = std::max<Prec>(prec, static_cast<Prec>(bits) + static_cast<Prec>(forms.size()) + 64);
  for (int attempt = 0; attempt < 8; ++attempt, p *= 2) {
    std::vector<PrecComplex> roots;
    roots.reserve(forms.size());
    for (const auto& f : forms) roots.push_back(j_invariant(TauPoint(f).value(p), p));
    auto poly = round_to_intpoly(poly_from_roots(roots));
    if (poly) return {*poly, std::move(roots), p};
  }
  throw InternalError("class polynomial did not round at any precision");
}

IntPoly hilbert_class_poly(const Disc& d, Prec prec) {
  if (auto cached = classpoly_from_cache(d.value())) return *cached;
  IntPoly p = hilbert_class_poly_full(d, prec).poly;
  classpoly_to_cache(d.value(), p);
  return p;
}

}  // namespace cmrel
