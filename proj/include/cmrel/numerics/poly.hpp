#pragma once

#include <gmpxx.h>

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cmrel/numerics/ball.hpp"

namespace cmrel {

/// Univariate integer polynomial, coefficient i multiplies X^i.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<mpz_class> coeffs);
  static IntPoly from_longs(const std::vector<long>& coeffs);
  static IntPoly x_minus(const mpz_class& a);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const mpz_class& coeff(int i) const;
  const std::vector<mpz_class>& coeffs() const { return c_; }
  const mpz_class& leading() const { return c_.back(); }

  mpq_class eval(const mpq_class& x) const;
  Complex eval(const Complex& z) const;
  PrecComplex eval(const PrecComplex& z) const;

  IntPoly derivative() const;
  mpz_class content() const;
  IntPoly primitive_part() const;  // content removed, positive leading coefficient

  IntPoly operator*(const IntPoly& o) const;
  IntPoly operator+(const IntPoly& o) const;
  IntPoly operator-(const IntPoly& o) const;
  bool operator==(const IntPoly& o) const { return c_ == o.c_; }

  /// "X^2 - 2" style, descending powers, variable name configurable.
  std::string to_string(const std::string& var = "X") const;

 private:
  void trim();
  std::vector<mpz_class> c_;
};

/// All complex roots with inclusion radii (each disc contains a root).
/// Uses Aberth iteration, staged from low to full precision.
std::vector<PrecComplex> complex_roots(const std::vector<PrecComplex>& coeffs, Prec prec);
std::vector<PrecComplex> complex_roots(const IntPoly& p, Prec prec);

/// Coefficients (ascending) of prod (X - r).
std::vector<PrecComplex> poly_from_roots(const std::vector<PrecComplex>& roots);

/// Round ball coefficients to integers; fails unless every ball lies within
/// 1/4 of an integer with zero imaginary part inside the ball.
std::optional<IntPoly> round_to_intpoly(const std::vector<PrecComplex>& coeffs);

/// Degrees of the irreducible factors of p mod a prime; empty when p is not
/// squarefree mod that prime (or the leading coefficient vanishes).
std::vector<int> factor_degrees_mod_p(const IntPoly& p, unsigned long prime);

/// Degrees k in (0, deg) that a rational factor could have, as constrained by
/// factorization patterns modulo the first `nprimes` usable primes.
std::set<int> possible_factor_degrees(const IntPoly& p, int nprimes = 30);

enum class Irreducibility { kIrreducible, kUnknown };

/// Cheap filter: proves irreducibility when the mod-p patterns leave no
/// proper factor degree.
Irreducibility irreducibility_filter(const IntPoly& p, int nprimes = 30);

/// Irreducibility certificate using the complex roots: every subset of roots
/// whose size is an admissible factor degree is checked for an integral
/// trace. Returns nullopt when the search budget is exhausted.
std::optional<bool> certify_irreducible(const IntPoly& p, const std::vector<PrecComplex>& roots,
                                        long budget = 50'000'000);

/// Bivariate integer polynomial sum c[i][j] X^i Y^j.
class BiPoly {
 public:
  BiPoly() = default;
  BiPoly(int deg_x, int deg_y);

  int deg_x() const { return static_cast<int>(c_.size()) - 1; }
  int deg_y() const { return c_.empty() ? -1 : static_cast<int>(c_[0].size()) - 1; }
  mpz_class& at(int i, int j) { return c_[i][j]; }
  const mpz_class& at(int i, int j) const { return c_[i][j]; }

  PrecComplex eval(const PrecComplex& x, const PrecComplex& y) const;
  mpq_class eval(const mpq_class& x, const mpq_class& y) const;
  /// Coefficients in Y of P(x0, Y), ascending.
  std::vector<PrecComplex> specialize_x(const PrecComplex& x0) const;
  IntPoly specialize_x(const mpz_class& x0) const;

  bool is_symmetric() const;
  size_t max_coeff_bits() const;
  bool operator==(const BiPoly& o) const { return c_ == o.c_; }

 private:
  std::vector<std::vector<mpz_class>> c_;
};

}  // namespace cmrel
