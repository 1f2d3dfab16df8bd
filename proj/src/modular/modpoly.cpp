#include "cmrel/modular/modpoly.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>

#include "cmrel/cache.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modular/jfunction.hpp"
#include "cmrel/numerics/factor.hpp"
#include "json.hpp"

namespace cmrel {

long psi(long N) {
  if (N < 1) throw InvalidInput("level must be positive");
  long r = N;
  long m = N;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    r = r / p * (p + 1);
    while (m % p == 0) m /= p;
  }
  if (m > 1) r = r / m * (m + 1);
  return r;
}

std::vector<MobiusMap> cyclic_isogeny_reps(long N) {
  std::vector<MobiusMap> out;
  for (long a = 1; a <= N; ++a) {
    if (N % a) continue;
    long d = N / a;
    for (long b = 0; b < d; ++b)
      if (std::gcd(std::gcd(a, b), d) == 1) out.push_back({a, b, 0, d});
  }
  return out;
}

namespace {

// Newton iteration for j(q) = y starting from q ~ 1/(y - 744).
Complex invert_j(const Complex& y, Prec p) {
  Complex q = Complex(Real(1, p), Real(0, p)) / (y - Complex(Real(744, p), Real(0, p)));
  Real tiny = mul_2si(Real(1, p), 8 - static_cast<long>(p));
  for (int it = 0; it < 200; ++it) {
    PrecComplex qb(q, Mag());
    Complex f = j_of_q(qb).mid() - y;
    Complex df = j_prime_of_q(qb).mid();
    Complex step = f / df;
    q -= step;
    if (abs(step) <= abs(q) * tiny) return q;
  }
  throw Indeterminate("j inversion did not converge");
}

std::optional<BiPoly> interpolate(int N, Prec p) {
  const long ps = psi(N);
  const long M = ps + 1;
  const long Rexp = 16;
  const auto reps = cyclic_isogeny_reps(N);

  PrecComplex two_pi_i = PrecComplex::i_pi(p) * 2;
  std::vector<PrecComplex> w;  // w[t] = exp(-2 pi i t / M)
  for (long t = 0; t < M; ++t) w.push_back(exp(-(two_pi_i * t) / M));

  std::vector<std::vector<PrecComplex>> vals(M);
  std::vector<Mag> delta(M);
  PrecComplex R = PrecComplex::exact(1L << Rexp, 0, p);
  for (long k = 0; k < M; ++k) {
    PrecComplex y = R * exp((two_pi_i * k) / M);
    Complex q = invert_j(y.mid(), p);
    Complex lq = log(q);
    Real twopi = Real::pi(p) * 2;
    PrecComplex tau(Complex(lq.im / twopi, -lq.re / twopi), Mag());
    PrecComplex x = j_invariant(tau, p);
    delta[k] = (x - y).abs_upper();
    std::vector<PrecComplex> roots;
    roots.reserve(reps.size());
    for (const auto& g : reps) roots.push_back(j_invariant(g.apply(tau), p));
    vals[k] = poly_from_roots(roots);
  }

  // Move each sample from j(tau_k) to the circle point y_k: for a polynomial of
  // degree psi on |x| = R, |c'| <= psi / R * max |c| <= psi / R * sum_k |c(y_k)|.
  for (long i = 0; i <= ps; ++i) {
    Mag s;
    for (long k = 0; k < M; ++k) s += vals[k][i].abs_upper();
    Mag slope = s * Mag(static_cast<double>(2 * ps)) * Mag::pow2(-Rexp);
    for (long k = 0; k < M; ++k) vals[k][i].add_err(slope * delta[k]);
  }

  BiPoly out(static_cast<int>(ps), static_cast<int>(ps));
  for (long i = 0; i <= ps; ++i) {
    std::vector<PrecComplex> col;
    for (long m = 0; m <= ps; ++m) {
      PrecComplex acc(p);
      for (long k = 0; k < M; ++k) acc += vals[k][i] * w[(k * m) % M];
      acc = acc / M;
      // divide by R^m, a power of two
      Complex mid(mul_2si(acc.re(), -Rexp * m), mul_2si(acc.im(), -Rexp * m));
      col.emplace_back(std::move(mid), acc.err().mul_2si(-Rexp * m));
    }
    auto r = round_to_intpoly(col);
    if (!r) return std::nullopt;
    for (int m = 0; m <= r->degree(); ++m) out.at(m, static_cast<int>(i)) = r->coeff(m);
  }
  if (!out.is_symmetric()) return std::nullopt;
  if (out.at(0, static_cast<int>(ps)) != 1) return std::nullopt;
  return out;
}

std::string to_payload(const ModPoly& mp) {
  nlohmann::json j;
  j["N"] = mp.N;
  j["degree"] = mp.poly.deg_x();
  j["coeffs"] = nlohmann::json::array();
  for (int a = 0; a <= mp.poly.deg_x(); ++a)
    for (int b = 0; b <= mp.poly.deg_y(); ++b)
      if (mp.poly.at(a, b) != 0) j["coeffs"].push_back({a, b, mp.poly.at(a, b).get_str()});
  return j.dump();
}

std::optional<ModPoly> from_payload(int N, const std::string& s) {
  try {
    auto j = nlohmann::json::parse(s);
    int deg = j.at("degree").get<int>();
    if (j.at("N").get<int>() != N || deg != psi(N)) return std::nullopt;
    ModPoly mp{N, BiPoly(deg, deg)};
    for (const auto& e : j.at("coeffs"))
      mp.poly.at(e.at(0).get<int>(), e.at(1).get<int>()) = mpz_class(e.at(2).get<std::string>());
    if (N > 1 && !mp.poly.is_symmetric()) return std::nullopt;
    return mp;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::shared_mutex g_mp_mutex;
std::map<int, std::unique_ptr<ModPoly>> g_mp;

}  // namespace

ModPoly compute_modular_polynomial(int N, Prec start_prec) {
  if (N < 1 || N > kMaxModPolyLevel) throw InvalidInput("level out of supported range");
  if (N == 1) {
    ModPoly mp{1, BiPoly(1, 1)};
    mp.poly.at(1, 0) = 1;
    mp.poly.at(0, 1) = -1;
    return mp;
  }
  const long ps = psi(N);
  Prec p = start_prec;
  if (p == 0)
    p = static_cast<Prec>(16 * ps + 12.0 * ps * std::log2(static_cast<double>(N)) + 128);
  for (int attempt = 0; attempt < 6; ++attempt, p *= 2) {
    if (auto r = interpolate(N, p)) return {N, std::move(*r)};
  }
  throw InternalError("modular polynomial did not round at any precision");
}

const ModPoly& modular_polynomial(int N) {
  if (N < 1 || N > kMaxModPolyLevel) throw InvalidInput("level out of supported range");
  {
    std::shared_lock lock(g_mp_mutex);
    auto it = g_mp.find(N);
    if (it != g_mp.end()) return *it->second;
  }
  std::unique_lock lock(g_mp_mutex);
  auto it = g_mp.find(N);
  if (it != g_mp.end()) return *it->second;
  auto cache = persistent_cache();
  std::optional<ModPoly> mp;
  if (cache)
    if (auto payload = cache->load("modpoly", std::to_string(N))) mp = from_payload(N, *payload);
  if (!mp) {
    mp = compute_modular_polynomial(N);
    if (cache) cache->store("modpoly", std::to_string(N), to_payload(*mp));
  }
  auto& slot = g_mp[N];
  slot = std::make_unique<ModPoly>(std::move(*mp));
  return *slot;
}

}  // namespace cmrel
