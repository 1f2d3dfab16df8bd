#pragma once

#include <utility>

#include "cmrel/numerics/qseries.hpp"
#include "cmrel/quadforms/quadforms.hpp"

namespace cmrel {

/// tau' = gamma(tau) in the standard fundamental domain; on the boundary the
/// representative with Re = +1/2, or Re >= 0 on the unit circle, is chosen.
/// Throws InvalidInput("not in upper half plane").
std::pair<PrecComplex, MobiusMap> reduce_to_fundamental_domain(const PrecComplex& tau);

/// q-expansion of j, exponents -1..T, with the tail model
/// |c(n)| <= e^{4 pi sqrt n} <= K R^n (tangent line at T). Thread-safe cache.
QSeries j_series(int T);

/// Exact coefficient c(n) of j, n >= -1.
mpz_class j_coefficient(int n);

/// Truncation giving a tail below 2^{-bits} for |q| <= qabs.
int j_truncation_for(const Mag& qabs, long bits);

/// j(tau) with certified radius. Reduces tau to the fundamental domain first.
PrecComplex j_invariant(const PrecComplex& tau, Prec prec);
PrecComplex j_invariant(const TauPoint& t, Prec prec);

/// j at a given nome q (small |q|) and its derivative dj/dq.
PrecComplex j_of_q(const PrecComplex& q);
PrecComplex j_prime_of_q(const PrecComplex& q);

}  // namespace cmrel
