#include "cmrel/numerics/algebraic.hpp"

#include "cmrel/error.hpp"
#include "cmrel/numerics/relation.hpp"

namespace cmrel {

namespace {

bool root_confirms(const IntPoly& poly, const PrecComplex& z, Prec prec) {
  Prec hi = std::max<Prec>(2 * prec, z.prec());
  std::vector<PrecComplex> roots = complex_roots(poly, hi);
  Mag thr = Mag::pow2(-static_cast<long>(prec) / 4);
  for (const auto& r : roots) {
    PrecComplex d = r - z;
    if (d.abs_upper() < thr) return true;
  }
  return false;
}

}  // namespace

std::optional<IntPoly> recognize_algebraic(const PrecComplex& z, int deg_bound,
                                           const mpz_class& height_bound, Prec prec) {
  if (deg_bound < 1) throw InvalidInput("degree bound must be positive");
  std::vector<PrecComplex> powers{PrecComplex::exact(1, 0, z.prec()), z};
  for (int d = 1; d <= deg_bound; ++d) {
    while (static_cast<int>(powers.size()) < d + 1) powers.push_back(powers.back() * z);
    std::optional<IntVec> rel = find_integer_relation(powers, height_bound, prec);
    if (!rel) continue;
    IntPoly poly = IntPoly(*rel).primitive_part();
    if (poly.degree() < 1) continue;
    if (irreducibility_filter(poly) == Irreducibility::kUnknown && poly.degree() > 1) {
      // Patterns mod p allow a factor: look for one among the roots.
      auto roots = complex_roots(poly, 2 * prec);
      if (certify_irreducible(poly, roots, 1'000'000) == std::optional<bool>(false)) continue;
    }
    if (root_confirms(poly, z, prec)) return poly;
  }
  return std::nullopt;
}

std::optional<mpq_class> recognize_rational(const PrecComplex& z, const mpz_class& height_bound,
                                            Prec prec) {
  auto poly = recognize_algebraic(z, 1, height_bound, prec);
  if (!poly || poly->degree() != 1) return std::nullopt;
  mpq_class r(-poly->coeff(0), poly->coeff(1));
  r.canonicalize();
  return r;
}

}  // namespace cmrel
