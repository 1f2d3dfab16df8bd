#pragma once

#include <vector>

#include "cmrel/numerics/poly.hpp"
#include "cmrel/quadforms/quadforms.hpp"

namespace cmrel {

inline constexpr int kMaxModPolyLevel = 20;

/// Classical modular polynomial Phi_N(X, Y).
struct ModPoly {
  int N = 1;
  BiPoly poly;
};

/// psi(N) = N prod_{p | N} (1 + 1/p), the index of Gamma_0(N).
long psi(long N);

/// Integer matrices (a, b; 0, d) with ad = N, 0 <= b < d, gcd(a, b, d) = 1.
std::vector<MobiusMap> cyclic_isogeny_reps(long N);

/// Phi_N for 1 <= N <= 20; throws InvalidInput("level out of supported range").
/// Results are kept in memory and in the persistent cache.
const ModPoly& modular_polynomial(int N);

/// Uncached computation starting at the given working precision. The
/// precision is doubled until every coefficient rounds within 1/4.
ModPoly compute_modular_polynomial(int N, Prec start_prec = 0);

}  // namespace cmrel
