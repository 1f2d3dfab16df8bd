#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace cmrel {

using Factorization = std::vector<std::pair<mpz_class, int>>;

/// Prime factorization of |n| (n != 0), primes ascending.
Factorization factorize(const mpz_class& n);

bool is_prime(const mpz_class& n);
bool is_prime(long n);

/// Primes p <= bound.
std::vector<long> primes_up_to(long bound);

/// Exponent of the prime p in n (n != 0).
int valuation(const mpz_class& n, const mpz_class& p);
int valuation(const mpq_class& q, const mpz_class& p);

long gcd_long(long a, long b);
long lcm_long(long a, long b);

}  // namespace cmrel
