#pragma once

#include <optional>

#include "cmrel/numerics/ball.hpp"
#include "cmrel/numerics/poly.hpp"

namespace cmrel {

/// Primitive integer polynomial of degree <= deg_bound and height <=
/// height_bound having a root within 2^{-prec/4} of z, or none. Candidates are
/// screened with mod-p factorization patterns and confirmed by refining the
/// nearby root at doubled precision.
std::optional<IntPoly> recognize_algebraic(const PrecComplex& z, int deg_bound,
                                           const mpz_class& height_bound, Prec prec);

/// Rational number p/q with |q| <= den_bound within 2^{-prec/4} of z (z real
/// within its radius), or none. Shortcut for degree one.
std::optional<mpq_class> recognize_rational(const PrecComplex& z, const mpz_class& height_bound,
                                            Prec prec);

}  // namespace cmrel
