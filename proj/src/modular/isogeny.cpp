#include "cmrel/modular/isogeny.hpp"

#include <sstream>

#include "cmrel/error.hpp"
#include "cmrel/modular/jfunction.hpp"

namespace cmrel {

TauPoint reduced_point(const TauPoint& s) { return TauPoint(reduce_form(s.form())); }

std::vector<TauPoint> hecke_neighbor_points(const TauPoint& s, long N) {
  if (N < 1) throw InvalidInput("level must be positive");
  std::vector<TauPoint> out;
  for (const auto& g : cyclic_isogeny_reps(N))
    out.emplace_back(reduce_form(transform_form(s.form(), g)));
  return out;
}

bool in_XN(const TauPoint& s1, const TauPoint& s2, long N) {
  if (N < 1) throw InvalidInput("level must be positive");
  // g(s1) has discriminant d1 * (N / e)^2 for some e | N: same fundamental part.
  if (fundamental_part(s1.disc()).first != fundamental_part(s2.disc()).first) return false;
  QuadForm target = reduce_form(s2.form());
  for (const auto& g : cyclic_isogeny_reps(N)) {
    QuadForm f = transform_form(s1.form(), g);
    if (f.disc() != target.disc()) continue;
    if (reduce_form(f) == target) return true;
  }
  return false;
}

bool in_XN_numeric(const PrecComplex& j1, const PrecComplex& j2, long N, Prec prec) {
  const ModPoly& mp = modular_polynomial(static_cast<int>(N));
  PrecComplex x = j1.with_prec(prec), y = j2.with_prec(prec);
  PrecComplex val = mp.poly.eval(x, y);
  // scale: sum |c_ab| max(1,|x|)^a max(1,|y|)^b
  Mag ax = max(x.abs_upper(), Mag(1.0)), ay = max(y.abs_upper(), Mag(1.0));
  Mag scale;
  for (int a = 0; a <= mp.poly.deg_x(); ++a)
    for (int b = 0; b <= mp.poly.deg_y(); ++b) {
      if (mp.poly.at(a, b) == 0) continue;
      Mag c = Mag::from_real_upper(Real(mp.poly.at(a, b), 64));
      scale += c * ax.pow_upper(a) * ay.pow_upper(b);
    }
  Mag thresh = scale * Mag::pow2(-static_cast<long>(prec) / 4);
  if (val.abs_upper() < thresh) return true;
  if (!val.contains_zero() && thresh < val.abs_lower()) return false;
  throw Indeterminate("indeterminate at current precision");
}

std::vector<PrecComplex> hecke_neighbors(const PrecComplex& j0, long N, Prec prec) {
  if (N == 1) return {j0};
  const ModPoly& mp = modular_polynomial(static_cast<int>(N));
  try {
    return complex_roots(mp.poly.specialize_x(j0.with_prec(prec)), prec);
  } catch (const Indeterminate&) {
    throw Indeterminate("indeterminate at current precision");
  }
}

IntPoly hecke_neighbor_poly(const mpz_class& j0, long N) {
  return modular_polynomial(static_cast<int>(N)).poly.specialize_x(j0);
}

long height_squared_of_quadratic_point(const TauPoint& t) {
  return std::max(t.form().a, t.form().c);
}

Real height_of_quadratic_point(const TauPoint& t, Prec prec) {
  return sqrt(Real(height_squared_of_quadratic_point(t), prec));
}

DIndependence is_D_independent(const std::vector<TauPoint>& points, long D) {
  if (D < 1) throw InvalidInput("D must be positive");
  DIndependence r;
  for (size_t i = 0; i < points.size(); ++i) {
    long d = points[i].disc();
    if (-d <= D) {
      std::ostringstream os;
      os << "|" << d << "| <= " << D << " at index " << i;
      r.independent = false;
      r.witness = os.str();
      r.index = i;
      return r;
    }
  }
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t k = i + 1; k < points.size(); ++k)
      for (long N = 1; N <= D; ++N) {
        if (!in_XN(points[i], points[k], N)) continue;
        std::ostringstream os;
        os << "pair (" << i << "," << k << ") in X_" << N;
        r.independent = false;
        r.witness = os.str();
        r.pair = {i, k};
        r.level = N;
        return r;
      }
  return r;
}

}  // namespace cmrel
