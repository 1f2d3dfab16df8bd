#include "cmrel/numerics/factor.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "cmrel/error.hpp"

namespace cmrel {

bool is_prime(const mpz_class& n) { return n > 1 && mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

bool is_prime(long n) { return is_prime(mpz_class(n)); }

std::vector<long> primes_up_to(long bound) {
  std::vector<long> out;
  if (bound < 2) return out;
  std::vector<bool> sieve(static_cast<size_t>(bound) + 1, true);
  for (long i = 2; i <= bound; ++i) {
    if (!sieve[static_cast<size_t>(i)]) continue;
    out.push_back(i);
    for (long j = i * i; j <= bound; j += i) sieve[static_cast<size_t>(j)] = false;
  }
  return out;
}

namespace {

// Brent's variant of Pollard rho; returns a nontrivial factor of composite n.
mpz_class rho(const mpz_class& n) {
  if (n % 2 == 0) return 2;
  for (unsigned long c = 1;; ++c) {
    mpz_class y = 2, x, g = 1, q = 1, ys;
    unsigned long r = 1, m = 128;
    auto f = [&](const mpz_class& v) {
      mpz_class t = v * v + c;
      mpz_mod(t.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      return t;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          mpz_class d = abs(x - y);
          q = q * d;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split(const mpz_class& n, std::map<mpz_class, int>& acc) {
  if (n == 1) return;
  if (is_prime(n)) {
    acc[n]++;
    return;
  }
  mpz_class d = rho(n);
  split(d, acc);
  split(n / d, acc);
}

}  // namespace

Factorization factorize(const mpz_class& n_in) {
  if (n_in == 0) throw InvalidInput("cannot factor zero");
  mpz_class n = abs(n_in);
  std::map<mpz_class, int> acc;
  for (unsigned long p = 2; p < 1000; p += (p == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      acc[mpz_class(p)]++;
      n /= p;
    }
  }
  split(n, acc);
  return Factorization(acc.begin(), acc.end());
}

int valuation(const mpz_class& n, const mpz_class& p) {
  if (n == 0) throw InvalidInput("valuation of zero");
  mpz_class m = n;
  int v = 0;
  while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
    m /= p;
    ++v;
  }
  return v;
}

int valuation(const mpq_class& q, const mpz_class& p) {
  return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

long gcd_long(long a, long b) { return std::gcd(a, b); }

long lcm_long(long a, long b) { return std::lcm(a, b); }

}  // namespace cmrel
