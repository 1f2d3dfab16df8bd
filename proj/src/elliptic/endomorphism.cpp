#include "cmrel/elliptic/endomorphism.hpp"

#include <cmath>

#include "cmrel/elliptic/analytic.hpp"
#include "cmrel/error.hpp"
#include "cmrel/quadforms/quadforms.hpp"

namespace cmrel {

std::string EndRing::to_string() const {
  if (!cm) return "Z";
  if (trace == 0) return "Z[sqrt(" + std::to_string(-norm) + ")]";
  return "Z[(1+sqrt(" + std::to_string(disc) + "))/2]";
}

const std::array<long, 13>& class_number_one_discriminants() {
  static const std::array<long, 13> d{-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163};
  return d;
}

EndRing endomorphism_ring(const CurveQ& E, Prec prec) {
  EndRing r;
  const mpq_class& j = E.j();
  if (j.get_den() != 1) return r;
  for (long D : class_number_one_discriminants()) {
    IntPoly H = hilbert_class_poly(Disc(D));
    if (H.degree() != 1 || -H.coeff(0) != j.get_num()) continue;
    r.cm = true;
    r.disc = D;
    if (D % 4 == 0) {
      r.trace = 0;
      r.norm = -D / 4;
    } else {
      r.trace = 1;
      r.norm = (1 - D) / 4;
    }
    break;
  }
  if (!r.cm) return r;

  Lattice2 L = periods(E, prec);
  // rho = (trace + sqrt(trace^2 - 4 norm)) / 2
  const long d = r.trace * r.trace - 4 * r.norm;
  Real s = sqrt(Real(-d, prec));
  PrecComplex rho(Complex(Real(r.trace, prec) / 2, s / 2), rounding_err(Complex(Real(0, prec), s)));
  const PrecComplex ws[2] = {L.w1, L.w2};
  for (int k = 0; k < 2; ++k) {
    PrecComplex img = rho * ws[k];
    auto [a, b] = L.coordinates(img);
    mpz_class ia = a.round(), ib = b.round();
    PrecComplex diff = img - L.w1 * ia - L.w2 * ib;
    Mag tol = ws[k].abs_upper().mul_2si(-static_cast<long>(prec) / 2);
    if (!(diff.abs_lower() <= tol)) throw InternalError("CM action does not preserve the period lattice");
    r.action[2 * k] = ia.get_si();
    r.action[2 * k + 1] = ib.get_si();
  }
  return r;
}

}  // namespace cmrel
