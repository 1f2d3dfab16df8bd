#pragma once

#include <array>
#include <string>

#include "cmrel/elliptic/curve.hpp"
#include "cmrel/numerics/real.hpp"

namespace cmrel {

/// End(E) over C: Z, or the imaginary quadratic order of discriminant disc
/// generated by rho with rho^2 - trace rho + norm = 0.
struct EndRing {
  bool cm = false;
  long disc = 0;
  long trace = 0, norm = 0;
  /// rho w1 = action[0] w1 + action[1] w2, rho w2 = action[2] w1 + action[3] w2.
  std::array<long, 4> action{1, 0, 0, 1};

  std::string to_string() const;  // "Z", "Z[sqrt(-1)]", "Z[(1+sqrt(-3))/2]"
};

/// Discriminants of the imaginary quadratic orders of class number one.
const std::array<long, 13>& class_number_one_discriminants();

/// Matches j(E) against the roots of the class-number-one Hilbert polynomials
/// and, for CM curves, checks rho Lambda in Lambda on the period lattice.
EndRing endomorphism_ring(const CurveQ& E, Prec prec = 128);

}  // namespace cmrel
