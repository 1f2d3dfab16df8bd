#pragma once

#include <gmpxx.h>

#include <vector>

#include "cmrel/numerics/ball.hpp"

namespace cmrel {

/// Truncated Laurent series sum_{n=v}^{T} c_n q^n with a tail model
/// |c_n| <= K R^n for every n > T.
class QSeries {
 public:
  QSeries() = default;
  QSeries(int valuation, std::vector<mpq_class> coeffs, Mag tail_k, Mag tail_r);

  int valuation() const { return valuation_; }
  int truncation() const { return valuation_ + static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<mpq_class>& coeffs() const { return coeffs_; }
  const mpq_class& coeff(int n) const;  // exponent n
  const Mag& tail_k() const { return tail_k_; }
  const Mag& tail_r() const { return tail_r_; }

  /// Bound on |sum_{n>T} c_n q^n| for |q| <= qabs; infinite if R qabs >= 1.
  Mag tail_bound(const Mag& qabs) const;

  /// Same series cut at a smaller truncation (tail model kept).
  QSeries truncated(int new_t) const;

 private:
  int valuation_ = 0;
  std::vector<mpq_class> coeffs_;
  Mag tail_k_;
  Mag tail_r_;
};

/// sum c_n q^n at q = e^{2 pi i tau}; throws InvalidInput("not in upper half plane").
PrecComplex eval_qseries(const QSeries& s, const PrecComplex& tau);

/// Same at a given q (|q| < 1).
PrecComplex eval_qseries_at_q(const QSeries& s, const PrecComplex& q);

}  // namespace cmrel
