#include "cmrel/numerics/relation.hpp"

#include <algorithm>
#include <cmath>

#include "cmrel/error.hpp"

namespace cmrel {

void normalize_sign(IntVec& v) {
  for (const auto& x : v) {
    if (x == 0) continue;
    if (x < 0)
      for (auto& y : v) y = -y;
    return;
  }
}

Mag relation_residual(const std::vector<PrecComplex>& values, const IntVec& m) {
  Prec p = values.empty() ? kDefaultPrec : values.front().prec();
  PrecComplex s(p);
  for (size_t i = 0; i < values.size(); ++i)
    if (m[i] != 0) s += values[i] * m[i];
  return s.abs_upper();
}

namespace {

struct Embedding {
  IntMatrix reduced;
  size_t n;
};

Embedding embed_and_reduce(const std::vector<PrecComplex>& values, const mpz_class& coeff_bound,
                           Prec prec) {
  const size_t n = values.size();
  if (n == 0) throw InvalidInput("no values");
  if (coeff_bound <= 0) throw InvalidInput("coefficient bound must be positive");
  bool complex_vals = false;
  Mag maxerr;
  for (const auto& v : values) {
    if (!v.mid().re.is_finite() || !v.mid().im.is_finite() || !v.err().is_finite())
      throw InvalidInput("non-finite value");
    if (!v.im().is_zero() || !v.err().is_zero()) complex_vals = true;
    maxerr = max(maxerr, v.err());
  }
  const long k = complex_vals ? 2 : 1;
  long s = static_cast<long>(prec) - 8;
  if (!maxerr.is_zero()) s = std::min(s, -maxerr.exponent() - 4);

  // Vectors up to the LLL factor times the box must be separated by the scale.
  double box = std::log2(std::sqrt(static_cast<double>(n)) * mpz_get_d(coeff_bound.get_mpz_t()))
               + (static_cast<double>(n) - 1) / 2;
  double needed = (static_cast<double>(n + static_cast<size_t>(k)) * box + 16) /
                  static_cast<double>(k);
  if (static_cast<double>(s) < needed) throw InsufficientPrecision();

  IntMatrix b(n, n + static_cast<size_t>(k));
  for (size_t i = 0; i < n; ++i) {
    b.at(i, i) = 1;
    b.at(i, n) = mul_2si(values[i].re(), s).round();
    if (k == 2) b.at(i, n + 1) = mul_2si(values[i].im(), s).round();
  }
  bool degenerate = false;
  try {
    b = reduce_lattice(b);
  } catch (const InvalidInput&) {
    degenerate = true;
  }
  if (degenerate) throw InternalError("embedding lattice is degenerate");
  return {std::move(b), n};
}

bool accept(const std::vector<PrecComplex>& values, const IntVec& m, const mpz_class& bound,
            Prec prec) {
  bool nonzero = std::any_of(m.begin(), m.end(), [](const mpz_class& x) { return x != 0; });
  if (!nonzero || max_abs(m) > bound) return false;
  return relation_residual(values, m) < Mag::pow2(-static_cast<long>(prec) / 4);
}

IntVec coefficient_part(const IntMatrix& b, size_t row, size_t n) {
  IntVec m(n);
  for (size_t j = 0; j < n; ++j) m[j] = b.at(row, j);
  return m;
}

}  // namespace

std::optional<IntVec> find_integer_relation(const std::vector<PrecComplex>& values,
                                            const mpz_class& coeff_bound, Prec prec) {
  Embedding e = embed_and_reduce(values, coeff_bound, prec);
  std::optional<IntVec> best;
  for (size_t i = 0; i < e.reduced.rows(); ++i) {
    IntVec m = coefficient_part(e.reduced, i, e.n);
    if (!accept(values, m, coeff_bound, prec)) continue;
    normalize_sign(m);
    if (!best || squared_norm(m) < squared_norm(*best)) best = std::move(m);
  }
  return best;
}

IntMatrix find_relation_lattice(const std::vector<PrecComplex>& values,
                                const mpz_class& coeff_bound, Prec prec) {
  Embedding e = embed_and_reduce(values, coeff_bound, prec);
  IntMatrix found(0, e.n);
  for (size_t i = 0; i < e.reduced.rows(); ++i) {
    IntVec m = coefficient_part(e.reduced, i, e.n);
    if (accept(values, m, coeff_bound, prec)) found.append_row(m);
  }
  if (found.rows() == 0) return found;
  // Exact relations form a saturated lattice; keep the saturation only if
  // its basis still passes the residual test.
  IntMatrix sat = saturate(found);
  bool ok = true;
  Mag thr = Mag::pow2(-static_cast<long>(prec) / 4);
  for (size_t i = 0; i < sat.rows() && ok; ++i)
    ok = relation_residual(values, sat.row(i)) < thr;
  return ok ? sat : hermite_form(found);
}

}  // namespace cmrel
