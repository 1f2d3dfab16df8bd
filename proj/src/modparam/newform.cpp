#include "cmrel/modparam/newform.hpp"

#include <map>
#include <mutex>

#include "cmrel/cache.hpp"
#include "cmrel/elliptic/tate.hpp"
#include "cmrel/error.hpp"
#include "json.hpp"

namespace cmrel {

long Newform::an(long n) const {
  if (n < 1 || n > T()) throw InvalidInput("coefficient index out of cached range");
  return a[static_cast<size_t>(n)];
}

namespace {

std::mutex g_nf_mutex;
std::map<std::string, std::shared_ptr<const Newform>> g_nf;

Newform compute(const CurveQ& M, long N, long T) {
  Newform f{N, M, {}};
  f.a.assign(static_cast<size_t>(T) + 1, 0);
  if (T >= 1) f.a[1] = 1;
  std::vector<long> spf(static_cast<size_t>(T) + 1, 0);
  for (long i = 2; i <= T; ++i)
    if (spf[static_cast<size_t>(i)] == 0)
      for (long j = i; j <= T; j += i)
        if (spf[static_cast<size_t>(j)] == 0) spf[static_cast<size_t>(j)] = i;
  std::map<long, long> aps;
  for (const auto& [p, v] : ap_up_to(M, T)) aps[p] = v;
  for (long n = 2; n <= T; ++n) {
    const long p = spf[static_cast<size_t>(n)];
    long m = n, pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    if (m > 1) {
      f.a[static_cast<size_t>(n)] = f.a[static_cast<size_t>(m)] * f.a[static_cast<size_t>(pk)];
      continue;
    }
    // n = p^k
    const long ap = aps.at(p);
    if (n == p) {
      f.a[static_cast<size_t>(n)] = ap;
    } else if (N % p == 0) {
      f.a[static_cast<size_t>(n)] = ap * f.a[static_cast<size_t>(n / p)];
    } else {
      f.a[static_cast<size_t>(n)] = ap * f.a[static_cast<size_t>(n / p)] - p * f.a[static_cast<size_t>(n / p / p)];
    }
  }
  return f;
}

std::string to_payload(const Newform& f) {
  nlohmann::json j;
  j["N"] = f.N;
  j["T"] = f.T();
  j["a"] = std::vector<long>(f.a.begin() + 1, f.a.end());
  return j.dump();
}

std::optional<Newform> from_payload(const CurveQ& M, long N, const std::string& s) {
  try {
    auto j = nlohmann::json::parse(s);
    if (j.at("N").get<long>() != N) return std::nullopt;
    auto a = j.at("a").get<std::vector<long>>();
    if (static_cast<long>(a.size()) != j.at("T").get<long>() || a.empty() || a[0] != 1) return std::nullopt;
    Newform f{N, M, {0}};
    f.a.insert(f.a.end(), a.begin(), a.end());
    return f;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::shared_ptr<const Newform> an_coefficients(const CurveQ& E, long T) {
  if (T < 1) throw InvalidInput("truncation must be positive");
  MinimalModel mm = minimal_model(E);
  const std::string key = mm.curve.to_string();
  std::lock_guard lock(g_nf_mutex);
  auto it = g_nf.find(key);
  if (it != g_nf.end() && it->second->T() >= T) return it->second;
  const long N = conductor(mm.curve).get_si();
  auto cache = persistent_cache();
  if (cache)
    if (auto payload = cache->load("an", key))
      if (auto f = from_payload(mm.curve, N, *payload); f && f->T() >= T) {
        auto ptr = std::make_shared<const Newform>(std::move(*f));
        g_nf[key] = ptr;
        return ptr;
      }
  // grow geometrically so repeated small extensions stay cheap
  long target = T;
  if (it != g_nf.end()) target = std::max(T, 2 * it->second->T());
  auto ptr = std::make_shared<const Newform>(compute(mm.curve, N, target));
  g_nf[key] = ptr;
  if (cache) cache->store("an", key, to_payload(*ptr));
  return ptr;
}

}  // namespace cmrel
