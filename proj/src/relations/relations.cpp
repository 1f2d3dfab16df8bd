#include "cmrel/relations/relations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "cmrel/elliptic/height.hpp"
#include "cmrel/elliptic/torsion.hpp"
#include "cmrel/error.hpp"
#include "cmrel/numerics/relation.hpp"

namespace cmrel {

Real masser_bound(const MasserInput& mi, Prec prec) {
  if (mi.n < 1) throw InvalidInput("n must be positive");
  if (mi.omega < 1) throw InvalidInput("omega must be positive");
  if (!(mi.eta > 0)) throw InvalidInput("eta must be positive");
  if (mi.q < mi.eta) throw InvalidInput("q < eta");
  const long d = mi.cm ? 2 * mi.n : mi.n;  // dimension of the ambient Z-module
  const Real ratio = Real::from_double(mi.q, prec) / Real::from_double(mi.eta, prec);
  Real r(mi.omega, prec);
  Real base(d, prec);
  for (long i = 0; i + 1 < d; ++i) r *= base;
  // ratio^{(d-1)/2}
  for (long i = 0; i + 1 < d - 1; i += 2) r *= ratio;
  if ((d - 1) % 2 == 1) r *= sqrt(ratio);
  return r;
}

mpz_class masser_coefficient_bound(const MasserInput& mi) {
  Real b = masser_bound(mi, 128);
  return -((-b).floor());
}

long TorsionTag::order() const {
  long g = std::gcd(std::gcd(a, b), t);
  return t / g;
}

long RelationLattice::rank() const {
  long r = static_cast<long>(basis.rows());
  return end.cm ? r / 2 : r;
}

std::string RelationLattice::completeness_label() const {
  return completeness == Completeness::MasserBound ? "complete" : "complete up to cap";
}

IntMatrix RelationLattice::exact_relations(const CurveQ&) const {
  const size_t r = basis.rows();
  const long t = torsion.empty() ? 1 : torsion.front().t;
  if (r == 0 || t == 1) return basis;
  IntMatrix m(r + 2, 2);
  for (size_t i = 0; i < r; ++i) {
    m.at(i, 0) = torsion[i].a;
    m.at(i, 1) = torsion[i].b;
  }
  m.at(r, 0) = t;
  m.at(r + 1, 1) = t;
  IntMatrix ker = left_kernel(m);
  IntMatrix rows(0, basis.cols());
  for (size_t k = 0; k < ker.rows(); ++k) {
    IntVec v(basis.cols(), 0);
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < basis.cols(); ++j) v[j] += ker.at(k, i) * basis.at(i, j);
    rows.append_row(v);
  }
  return hermite_form(rows);
}

PrecComplex rho_times(const EndRing& end, const Lattice2& L, const PrecComplex& z) {
  // rho = action[0] + action[1] tau since rho w1 = action[0] w1 + action[1] w2
  const Prec p = z.prec();
  PrecComplex rho = PrecComplex::exact(end.action[0], 0, p) + L.tau() * end.action[1];
  return rho * z;
}

bool verify_relation_exact(const CurveQ& E, const std::vector<Point>& points, const IntVec& coeffs,
                           const Point& target) {
  if (coeffs.size() != points.size()) throw InvalidInput("coefficient count mismatch");
  Point s = Point::infinity();
  for (size_t i = 0; i < points.size(); ++i) {
    if (!on_curve(E, points[i])) throw InvalidInput("point not on curve");
    if (coeffs[i] != 0) s = point_add(E, s, point_mul(E, points[i], coeffs[i]));
  }
  return s == target;
}

namespace {

struct Logs {
  Lattice2 L;
  std::vector<PrecComplex> z;
};

Logs compute_logs(const CurveQ& E, const std::vector<RelPoint>& pts, Prec prec) {
  Logs out{periods(E, prec), {}};
  for (const auto& P : pts) {
    if (P.log && P.log->prec() >= prec)
      out.z.push_back(P.log->with_prec(prec));
    else if (P.exact)
      out.z.push_back(elliptic_log(E, out.L, *P.exact));
    else
      out.z.push_back(elliptic_log(E, out.L, P.approx));
  }
  return out;
}

Prec available_prec(const std::vector<RelPoint>& pts, Prec want) {
  Prec p = want;
  for (const auto& P : pts) {
    if (P.exact) continue;
    if (P.log)
      p = std::min(p, P.log->prec());
    else if (!P.approx.inf)
      p = std::min(p, P.approx.x.prec());
  }
  return p;
}

// lattice-reduced distance of sum (a_i + b_i rho) z_i - z_target
double residual_distance(const EndRing& end, const Logs& lg, const IntVec& coeffs,
                         const PrecComplex& ztarget) {
  PrecComplex s = -ztarget;
  const size_t n = lg.z.size();
  for (size_t i = 0; i < n; ++i) {
    const mpz_class& a = end.cm ? coeffs[2 * i] : coeffs[i];
    if (a != 0) s += lg.z[i] * a;
    if (end.cm && coeffs[2 * i + 1] != 0) s += rho_times(end, lg.L, lg.z[i]) * coeffs[2 * i + 1];
  }
  return lg.L.lattice_distance(s);
}

PrecComplex tag_z(const Lattice2& L, long a, long b, long t) { return (L.w1 * a + L.w2 * b) / t; }

long exponent_of(const TorsionGroup& tg) { return tg.invariants.empty() ? 1 : tg.invariants.back(); }

std::optional<Point> rational_torsion_at(const CurveQ& E, const TorsionGroup& tg, const Lattice2& L,
                                         const PrecComplex& z) {
  for (const Point& T : tg.points)
    if (L.lattice_distance(elliptic_log(E, L, T) - z) < 1e-20) return T;
  return std::nullopt;
}

// decides at prec bits; throws Indeterminate in the gray zone
bool decide(double dist, Prec p) {
  const long hi = std::min<long>(static_cast<long>(p) / 2, 900);
  const long lo = std::min<long>(static_cast<long>(p) / 4, 400);
  if (dist < std::ldexp(1.0, -static_cast<int>(hi))) return true;
  if (dist > std::ldexp(1.0, -static_cast<int>(lo))) return false;
  throw Indeterminate("indeterminate");
}

}  // namespace

bool verify_relation(const CurveQ& E, const EndRing& end, const std::vector<RelPoint>& points,
                     const IntVec& coeffs, const Point& target, Prec prec) {
  const size_t w = end.cm ? 2 * points.size() : points.size();
  if (coeffs.size() != w) throw InvalidInput("coefficient count mismatch");
  bool all_exact = std::all_of(points.begin(), points.end(), [](const RelPoint& P) { return P.exact.has_value(); });
  if (all_exact && !end.cm) {
    std::vector<Point> pts;
    for (const auto& P : points) pts.push_back(*P.exact);
    return verify_relation_exact(E, pts, coeffs, target);
  }
  const Prec p = available_prec(points, prec);
  Logs lg = compute_logs(E, points, p);
  return decide(residual_distance(end, lg, coeffs, elliptic_log(E, lg.L, target)), p);
}

namespace {

struct Attempt {
  bool ok = false;
  IntMatrix gens;
  std::vector<TorsionTag> tags;
  std::vector<bool> exact;
};

Attempt attempt(const CurveQ& E, const EndRing& end, const TorsionGroup& tg,
                const std::vector<RelPoint>& pts, const mpz_class& bound, Prec prec) {
  const long t = exponent_of(tg);
  const size_t n = pts.size();
  const size_t w = end.cm ? 2 * n : n;
  Logs lg = compute_logs(E, pts, prec);
  std::vector<PrecComplex> values;
  for (size_t i = 0; i < n; ++i) {
    values.push_back(lg.z[i]);
    if (end.cm) values.push_back(rho_times(end, lg.L, lg.z[i]));
  }
  values.push_back(lg.L.w1 / t);
  values.push_back(lg.L.w2 / t);
  // the torsion columns need at most t times the coefficient sum, times the
  // size of rho in lattice coordinates
  long spread = 1;
  if (end.cm)
    for (long c : end.action) spread = std::max(spread, 1 + std::labs(c));
  mpz_class box = bound * static_cast<long>(w) * t * spread + t;
  IntMatrix F = find_relation_lattice(values, box, prec);

  const bool all_exact = std::all_of(pts.begin(), pts.end(), [](const RelPoint& P) { return P.exact.has_value(); });
  std::vector<Point> exact_pts;
  if (all_exact)
    for (const auto& P : pts) exact_pts.push_back(*P.exact);

  Attempt out;
  out.gens = IntMatrix(0, w);
  for (size_t r = 0; r < F.rows(); ++r) {
    IntVec m(w);
    for (size_t j = 0; j < w; ++j) m[j] = F.at(r, j);
    // sum m z + a w1 / t + b w2 / t = 0, so the target has parameter -(a w1 + b w2) / t
    mpz_class am = -F.at(r, w) % t, bm = -F.at(r, w + 1) % t;
    if (am < 0) am += t;
    if (bm < 0) bm += t;
    TorsionTag tag{am.get_si(), bm.get_si(), t, std::nullopt};
    PrecComplex zt = tag_z(lg.L, tag.a, tag.b, t);
    tag.point = rational_torsion_at(E, tg, lg.L, zt);
    bool good = false;
    bool exact = false;
    if (all_exact && !end.cm) {
      if (!tag.point) return {};
      good = verify_relation_exact(E, exact_pts, m, *tag.point);
      exact = true;
    } else {
      try {
        const Prec vp = all_exact ? 2 * prec : prec;
        Logs hi = all_exact ? compute_logs(E, pts, vp) : lg;
        good = decide(residual_distance(end, hi, m, tag_z(hi.L, tag.a, tag.b, t)), available_prec(pts, vp));
      } catch (const Indeterminate&) {
        return {};
      }
    }
    if (!good) return {};
    out.gens.append_row(m);
    out.tags.push_back(tag);
    out.exact.push_back(exact);
  }
  out.ok = true;
  return out;
}

struct CurveData {
  EndRing end;
  TorsionGroup tg;
};

const CurveData& curve_data(const CurveQ& E) {
  static std::mutex mu;
  static std::map<std::string, CurveData> memo;
  const std::string key = E.to_string();
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  CurveData d{endomorphism_ring(E), torsion_subgroup(E)};
  std::lock_guard<std::mutex> lock(mu);
  return memo.emplace(key, std::move(d)).first->second;
}

std::optional<double> cached_eta(const CurveQ& E, long bound) {
  static std::mutex mu;
  static std::map<std::pair<std::string, long>, std::optional<double>> memo;
  const auto key = std::make_pair(E.to_string(), bound);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  std::optional<double> eta;
  if (auto e = empirical_eta(E, bound)) eta = e->to_double() - e->err.to_double();
  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, eta);
  return eta;
}

}  // namespace

RelationLattice relation_lattice(const CurveQ& E, const std::vector<RelPoint>& points,
                                 const RelationOptions& opt) {
  if (points.empty()) throw InvalidInput("no points");
  for (const auto& P : points)
    if (P.exact && !on_curve(E, *P.exact)) throw InvalidInput("point not on curve");
  RelationLattice rl;
  rl.n = static_cast<long>(points.size());
  const CurveData& cd = curve_data(E);
  rl.end = cd.end;
  const TorsionGroup& tg = cd.tg;
  const long t = exponent_of(tg);

  const bool all_exact = std::all_of(points.begin(), points.end(), [](const RelPoint& P) { return P.exact.has_value(); });
  std::optional<double> q, eta;
  if (all_exact) {
    double qmax = 0;
    for (const auto& P : points) {
      HeightValue h = canonical_height(E, *P.exact);
      qmax = std::max(qmax, h.to_double() + h.err.to_double());
    }
    q = qmax;
    eta = cached_eta(E, opt.eta_search);
  }
  if (q && eta) {
    rl.coeff_bound = masser_coefficient_bound({rl.n, tg.order(), std::max(*q, *eta), *eta, rl.end.cm});
    rl.completeness = Completeness::MasserBound;
  } else {
    if (opt.cap <= 0 || opt.cap > opt.max_cap) throw Indeterminate("unbounded search");
    rl.coeff_bound = opt.cap;
    rl.completeness = Completeness::UpToCap;
  }

  const Prec ceiling = available_prec(points, opt.max_prec);
  Prec p = std::min(opt.prec, ceiling);
  while (true) {
    Attempt a;
    try {
      a = attempt(E, rl.end, tg, points, rl.coeff_bound, p);
    } catch (const InsufficientPrecision&) {
      a.ok = false;
    }
    if (!a.ok) {
      if (p >= ceiling) throw InsufficientPrecision();
      p = std::min(p * 2, ceiling);
      continue;
    }
    rl.prec = p;
    rl.basis = hermite_form(a.gens);
    Lattice2 L = periods(E, p);
    for (size_t i = 0; i < rl.basis.rows(); ++i) {
      IntVec c;
      if (!solve_integral(a.gens, rl.basis.row(i), c)) throw InternalError("Hermite row outside the lattice");
      long ta = 0, tb = 0;
      bool ex = true;
      for (size_t j = 0; j < c.size(); ++j) {
        mpz_class cj = c[j] % t;
        ta = (ta + cj.get_si() * a.tags[j].a) % t;
        tb = (tb + cj.get_si() * a.tags[j].b) % t;
        if (c[j] != 0) ex = ex && a.exact[j];
      }
      if (ta < 0) ta += t;
      if (tb < 0) tb += t;
      TorsionTag tag{ta, tb, t, std::nullopt};
      tag.point = rational_torsion_at(E, tg, L, tag_z(L, ta, tb, t));
      rl.torsion.push_back(tag);
      rl.exact.push_back(ex);
    }
    return rl;
  }
}

RelationLattice relation_lattice(const CurveQ& E, const std::vector<Point>& points,
                                 const RelationOptions& opt) {
  std::vector<RelPoint> rp;
  for (const auto& P : points) rp.push_back(RelPoint::rational(P));
  return relation_lattice(E, rp, opt);
}

CosetDesc smallest_torsion_coset(const RelationLattice& rl) {
  CosetDesc c;
  c.n = rl.n;
  c.lattice = rl.basis;
  c.dim = rl.n - rl.rank();
  c.t = 1;
  for (const auto& tag : rl.torsion) c.t = std::lcm(c.t, tag.order());
  return c;
}

}  // namespace cmrel
