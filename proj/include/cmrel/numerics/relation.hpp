#pragma once

#include <optional>
#include <vector>

#include "cmrel/numerics/ball.hpp"
#include "cmrel/numerics/intmat.hpp"

namespace cmrel {

/// Shortest integer vector m with |m|_inf <= coeff_bound and
/// |sum m_i v_i| < 2^{-prec/4} found by lattice embedding, or none.
/// Throws InsufficientPrecision when the scale allowed by the value radii is
/// too small to separate relations of that size from near misses.
std::optional<IntVec> find_integer_relation(const std::vector<PrecComplex>& values,
                                            const mpz_class& coeff_bound, Prec prec);

/// Basis (Hermite form) of the lattice spanned by all small-residual vectors
/// found by the same embedding. Rows are sign-normalized; may be empty.
IntMatrix find_relation_lattice(const std::vector<PrecComplex>& values,
                                const mpz_class& coeff_bound, Prec prec);

/// Upper bound on |sum m_i v_i| including the value radii.
Mag relation_residual(const std::vector<PrecComplex>& values, const IntVec& m);

/// Flip sign so the first nonzero entry is positive.
void normalize_sign(IntVec& v);

}  // namespace cmrel
