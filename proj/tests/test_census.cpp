#include <random>
#include <set>

#include "cmrel/census/census.hpp"
#include "cmrel/elliptic/endomorphism.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modular/isogeny.hpp"
#include "cmrel/modular/jfunction.hpp"
#include "doctest.h"

using namespace cmrel;

namespace {

const CurveQ E11 = CurveQ::from_longs(0, -1, 1, -10, -20);
const CurveQ E37 = CurveQ::from_longs(0, 0, 1, -1, 0);

std::shared_ptr<const ParamMap> pm11() {
  static const auto pm = std::make_shared<const ParamMap>(make_param_map(E11, 192));
  return pm;
}
std::shared_ptr<const ParamMap> pm37() {
  static const auto pm = std::make_shared<const ParamMap>(make_param_map(E37, 192));
  return pm;
}

ScanConfig small_config(long n, long delta_max) {
  ScanConfig c;
  c.n = n;
  c.delta_max = delta_max;
  c.isog_bound = 8;
  c.threads = 1;
  return c;
}

SpecialDesc free_pair(const Link& l) {
  SpecialDesc S;
  S.n = 2;
  S.links = {l};
  return S;
}

// Phi_N(j(a), j(b)) = 0 evaluated through the q-expansion of j
std::set<long> numeric_links(const TauPoint& a, const TauPoint& b, long bound) {
  const Prec p = 512;
  const PrecComplex ja = j_invariant(a, p), jb = j_invariant(b, p);
  std::set<long> out;
  if (abs((ja - jb).mid()).to_double() < 1e-40 * (1 + ja.abs_upper().to_double())) out.insert(1);
  for (long N = 2; N <= bound; ++N)
    if (in_XN_numeric(ja, jb, N, p)) out.insert(N);
  return out;
}

std::set<long> recorded_links(const SpecialDesc& S) {
  std::set<long> out;
  for (const auto& l : S.links) out.insert(l.degree);
  return out;
}

}  // namespace

TEST_CASE("special closure on Y(1)") {
  const TauPoint s7(QuadForm{1, 1, 2});
  SUBCASE("duplicated point") {
    SpecialDesc S = special_closure_Y({s7, s7}, 10);
    CHECK(S.dim() == 0);
    REQUIRE(!S.links.empty());
    CHECK(S.links.front().kind == "equal");
    CHECK(S.links.front().degree == 1);
  }
  SUBCASE("2-isogenous points") {
    const TauPoint t(QuadForm{1, 2, 8});  // 2 tau_{-7}
    CHECK(t.value(128).mid().im.to_double() == doctest::Approx(2 * s7.value(128).mid().im.to_double()));
    SpecialDesc S = special_closure_Y({s7, t}, 10);
    CHECK(S.dim() == 0);
    CHECK(recorded_links(S).count(2) == 1);
    CHECK(recorded_links(S) == numeric_links(s7, t, 10));
    for (const auto& l : S.links) CHECK(l.g.det() == l.degree);
  }
  SUBCASE("different CM fields") {
    SpecialDesc S = special_closure_Y({TauPoint(QuadForm{1, 1, 1}), TauPoint(QuadForm{1, 0, 1})}, 10);
    CHECK(S.links.empty());
    CHECK(numeric_links(TauPoint(QuadForm{1, 1, 1}), TauPoint(QuadForm{1, 0, 1}), 10).empty());
  }
  SUBCASE("bounds") {
    CHECK_THROWS_AS(special_closure_Y({s7}, 0), InvalidInput);
    CHECK_THROWS_AS(special_closure_Y({s7}, 21), InvalidInput);
  }
}

TEST_CASE("recorded links agree with modular polynomial vanishing") {
  std::vector<TauPoint> pool;
  for (long D : {-3, -4, -7, -8, -11, -12, -15, -16, -19, -20, -23, -28})
    for (const auto& f : reduced_forms(Disc(D))) pool.push_back(TauPoint(f));
  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const TauPoint& a = pool[rng() % pool.size()];
    const TauPoint& b = pool[rng() % pool.size()];
    SpecialDesc S = special_closure_Y({a, b}, 6);
    CHECK_MESSAGE(recorded_links(S) == numeric_links(a, b, 6), a.to_string() << " " << b.to_string());
    for (const auto& l : S.links) {
      // g a equals b up to SL_2(Z)
      PrecComplex ja = j_invariant(l.g.apply(a.value(256)), 256), jb = j_invariant(b, 256);
      CHECK(abs((ja - jb).mid()).to_double() < 1e-30 * (1 + jb.abs_upper().to_double()));
    }
  }
}

TEST_CASE("Gamma_0(N) equivalence") {
  const TauPoint a(QuadForm{11, 9, 2});
  auto g = gamma0_equivalence(a, TauPoint(reduce_form(a.form())), 1);
  REQUIRE(g.has_value());
  CHECK(g->det() == 1);
  // Heegner forms of level 11 for different classes are not equivalent
  const auto forms = heegner_forms(Disc(-7), 11);
  REQUIRE(forms.size() == 1);
  const TauPoint h(forms[0]);
  CHECK(gamma0_equivalence(h, h, 11).has_value());
  const TauPoint hb(QuadForm{forms[0].a, -forms[0].b, forms[0].c});
  CHECK(!gamma0_equivalence(h, hb, 11).has_value());
  // but the Fricke involution relates the two square roots of the discriminant
  SpecialDesc S = special_closure_Y({h, hb}, 4, 11);
  bool fricke = false;
  for (const auto& l : S.links) fricke = fricke || l.kind == "fricke";
  CHECK(fricke);
}

TEST_CASE("family dependence") {
  ScanConfig cfg = small_config(2, 10);
  SUBCASE("generic point of Y") {
    SpecialDesc S;
    S.n = 1;
    CHECK(!family_dependence_test(CorrespondenceSpec{pm37(), 1}, S, cfg).has_value());
  }
  SUBCASE("diagonal") {
    auto r = family_dependence_test(CorrespondenceSpec{pm37(), 1}, free_pair({0, 1, 1, {}, "equal"}), cfg);
    REQUIRE(r.has_value());
    CHECK(r->coset.lattice == IntMatrix::from_longs({{1, -1}}));
    CHECK(r->coset.dim == 1);
    CHECK(r->coset.t == 1);
  }
  SUBCASE("Atkin-Lehner graph on X_0(11)") {
    const MobiusMap w{0, -1, 11, 0};
    auto r = family_dependence_test(CorrespondenceSpec{pm11(), 1}, free_pair({0, 1, 11, w, "fricke"}), cfg);
    REQUIRE(r.has_value());
    CHECK(r->coset.lattice == IntMatrix::from_longs({{1, 1}}));
    CHECK(r->coset.dim == 1);
    CHECK(r->coset.proper());
    CHECK(5 % r->coset.t == 0);
    // oracle: phi(tau) + phi(w tau) is the image of the cusp 0, of order 5
    const ParamMap& pm = *pm11();
    const PrecComplex z0 = phi_eval_cusp(pm, mpq_class(0)).z;
    const PrecComplex tau(Complex::from_double(0.21, 0.83, pm.prec));
    const PrecComplex s = phi_eval(pm, tau).z + phi_eval(pm, w.apply(tau)).z;
    const double d0 = pm.lattice.lattice_distance(s - z0), d1 = pm.lattice.lattice_distance(s + z0);
    CHECK(std::min(d0, d1) < 1e-40);
    CHECK(torsion_order_of(pm.lattice, z0) == 5);
    CHECK(r->coset.t == 5);
  }
  SUBCASE("fixed coordinate must be free somewhere") {
    SpecialDesc S;
    S.n = 1;
    S.fixed[0] = -7;
    S.base = {YPoint::from_cm(TauPoint(QuadForm{1, 1, 2}), 64)};
    CHECK_THROWS_AS(family_dependence_test(CorrespondenceSpec{pm37(), 1}, S, cfg), InvalidInput);
  }
}

TEST_CASE("defect") {
  GraphRecord whole;
  whole.S.n = 3;
  whole.B.n = 3;
  whole.B.dim = 3;
  whole.dim_W = 3;
  CHECK(defect(whole) == 3);

  GraphRecord torsion_point;
  torsion_point.S.n = 1;
  torsion_point.S.fixed[0] = -7;
  torsion_point.B.n = 1;
  torsion_point.B.dim = 0;
  CHECK(defect(torsion_point) == 0);

  GraphRecord curve;
  curve.S = free_pair({0, 1, 11, {0, -1, 11, 0}, "fricke"});
  curve.B.n = 2;
  curve.B.dim = 1;
  curve.dim_W = curve.S.dim();
  CHECK(curve.S.dim() == 1);
  CHECK(defect(curve) == 1);
}

TEST_CASE("exemplary filter") {
  const ParamMap& pm = *pm11();
  CorrespondenceSpec cs{pm11(), 1};
  const MobiusMap w{0, -1, 11, 0};
  ScanConfig cfg = small_config(2, 10);

  GraphRecord fam;
  fam.S = free_pair({0, 1, 11, w, "fricke"});
  auto fr = family_dependence_test(cs, fam.S, cfg);
  REQUIRE(fr.has_value());
  fam.family = true;
  fam.relations = fr->coset.lattice;
  fam.tags = fr->tags;
  fam.B = fr->coset;
  fam.branch = fr->branch;
  fam.dim_W = 1;
  fam.dependent = true;

  // special points on the family: Heegner points s and w s
  std::vector<GraphRecord> records{fam};
  for (long D : {-7, -19, -40}) {
    for (const auto& f : heegner_forms(Disc(D), 11)) {
      const TauPoint s(f), ws(transform_form(f, w));
      std::vector<RelPoint> rp;
      for (const auto& t : {s, ws}) {
        PhiValue v = phi_eval(pm, t.value(pm.prec));
        RelPoint r = RelPoint::numeric(to_minimal_model(pm, v.point));
        r.log = v.z;
        rp.push_back(r);
      }
      RelationLattice rl = relation_lattice(pm.mm.curve, rp, {.prec = 192});
      GraphRecord A;
      A.S = special_closure_Y({s, ws}, 4, 11);
      A.tuple = {YPoint::from_cm(s, 64), YPoint::from_cm(ws, 64)};
      A.branch = {0, 0};
      A.relations = rl.basis;
      A.tags = rl.torsion;
      A.B = smallest_torsion_coset(rl);
      A.dependent = A.B.proper();
      CHECK(A.dependent);
      CHECK(A.relations == fam.relations);
      CHECK(special_contains(fam.S, A.tuple, 11));
      records.push_back(A);
    }
  }
  REQUIRE(records.size() >= 4);
  std::vector<GraphRecord> kept = exemplary_filter(records, 11);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].family);
  for (size_t i = 1; i < records.size(); ++i) CHECK(records[i].dominated_by == 0);

  SUBCASE("incomparable lattices") {
    GraphRecord a = records[1], b = records[1];
    b.tuple = {records[1].tuple[0], records[1].tuple[0]};
    b.S = special_closure_Y({*b.tuple[0].cm, *b.tuple[1].cm}, 4, 11);
    b.relations = IntMatrix::from_longs({{1, -1}});
    b.tags = {TorsionTag{0, 0, 5, std::nullopt}};
    // a larger S whose coset does not lie in b's
    std::vector<GraphRecord> two{fam, b};
    CHECK(exemplary_filter(two, 11).size() == 2);
    std::vector<GraphRecord> pts{a, b};
    CHECK(exemplary_filter(pts, 11).size() == 2);
  }
}

TEST_CASE("scan of small discriminants") {
  CorrespondenceSpec cs{pm37(), 1};
  SUBCASE("below the smallest discriminant") {
    CensusReport r = scan_tuples(cs, small_config(2, 2));
    CHECK(r.points == 0);
    CHECK(r.tuples == 0);
    CHECK(r.records.empty());
    CHECK(!r.n_star.has_value());
  }
  SUBCASE("single points") {
    CensusReport r = scan_tuples(cs, small_config(1, 40));
    CHECK(r.points > 0);
    CHECK(r.indeterminate.empty());
    // oracle: torsion order of each image from its elliptic logarithm
    const ParamMap& pm = *pm37();
    long tors = 0;
    for (const auto& y : heegner_points_up_to(37, 40, pm.prec))
      if (torsion_order_of(pm.lattice, phi_eval(pm, y.cm->value(pm.prec)).z, 12) > 0) ++tors;
    CHECK(static_cast<long>(r.torsion_images.size()) == tors);
    REQUIRE(r.n_star.has_value());
    CHECK(*r.n_star >= 1);
  }
  SUBCASE("pairs") {
    CensusReport r = scan_tuples(cs, small_config(2, 7));
    REQUIRE(r.points == 6);
    CHECK(r.tuples == 21);
    CHECK(r.indeterminate.empty());
    CHECK(r.anomalous == 0);
    const ParamMap& pm = *pm37();
    const EndRing end = endomorphism_ring(pm.mm.curve);
    bool diagonal_seen = false;
    for (const auto& g : r.records) {
      CHECK(defect(g) == g.B.dim + g.S.dim() - g.dim_W);
      if (g.family) continue;
      CHECK(g.dependent);
      CHECK(!g.witnesses.empty());
      std::vector<RelPoint> rp;
      for (const auto& y : g.tuple) {
        PhiValue v = phi_eval(pm, y.cm->value(pm.prec));
        RelPoint p = RelPoint::numeric(to_minimal_model(pm, v.point));
        rp.push_back(p);
      }
      for (size_t i = 0; i < g.relations.rows(); ++i)
        CHECK(verify_relation(pm.mm.curve, end, rp, g.relations.row(i), Point::infinity(), 192));
      if (g.tuple[0].label == g.tuple[1].label) {
        diagonal_seen = true;
        CHECK(g.relations == IntMatrix::from_longs({{1, -1}}));
        CHECK(!g.exemplary);
        REQUIRE(g.dominated_by >= 0);
        const GraphRecord& F = r.records[static_cast<size_t>(g.dominated_by)];
        CHECK(F.family);
        CHECK(F.S.dim() == 1);
      }
    }
    CHECK(diagonal_seen);
    // surviving records form an antichain
    for (const auto& a : r.records)
      for (const auto& b : r.records)
        if (&a != &b && a.exemplary && b.exemplary) CHECK(!dominates(a, b, 37));
    REQUIRE(r.d_star.has_value());
    CHECK(r.independent_label.find("complete up to cap") != std::string::npos);
  }
  SUBCASE("deterministic") {
    CensusReport a = scan_tuples(cs, small_config(2, 4));
    ScanConfig c = small_config(2, 4);
    c.threads = 3;
    CensusReport b = scan_tuples(cs, c);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].key() == b.records[i].key());
  }
  SUBCASE("invalid configuration") {
    ScanConfig c = small_config(5, 10);
    CHECK_THROWS_AS(scan_tuples(cs, c), InvalidInput);
    c = small_config(1, 10);
    c.isog_bound = 30;
    CHECK_THROWS_AS(scan_tuples(cs, c), InvalidInput);
  }
}

TEST_CASE("Heegner point lists") {
  auto pts = heegner_points_up_to(37, 7, 64);
  CHECK(pts.size() == 6);
  std::set<std::string> labels;
  for (const auto& y : pts) {
    labels.insert(y.label);
    CHECK(y.cm->form().a % 37 == 0);
  }
  CHECK(labels.size() == pts.size());
  CHECK(heegner_points_up_to(11, 2, 64).empty());
}

TEST_CASE("U-special scans") {
  CorrespondenceSpec cs{pm37(), 1};
  const PrecComplex u(Complex::from_double(0.1234, 1.1, 192));
  SUBCASE("orbit sizes") {
    CHECK(hecke_orbit_points({u}, 0, 64).size() == 1);
    CHECK(hecke_orbit_points({u}, 2, 64).size() == 1 + 3);
    CHECK(hecke_orbit_points({u}, 3, 64).size() == 1 + 3 + 4);
  }
  SUBCASE("links by construction") {
    auto pts = hecke_orbit_points({u}, 2, 192);
    SpecialDesc S = special_closure_U({pts[0], pts[1]});
    REQUIRE(S.links.size() == 1);
    CHECK(S.links[0].degree == 2);
    CHECK(S.links[0].kind == "hecke");
    CHECK(special_contains(S, {pts[0], pts[1]}, 1));
    SpecialDesc T = special_closure_U({pts[1], pts[2]});
    REQUIRE(T.links.size() == 1);
    CHECK(T.links[0].degree == 4);  // through u: degree 2 then 2
  }
  SUBCASE("generic base point") {
    ScanConfig c = small_config(1, 10);
    c.depth = 2;
    CensusReport r = u_special_scan(cs, {u}, c);
    CHECK(r.points == 4);
    CHECK(r.torsion_images.empty());
    CHECK(r.records.empty());
    c.depth = 0;
    CHECK(u_special_scan(cs, {u}, c).points == 1);
  }
  SUBCASE("duplicated orbit point") {
    ScanConfig c = small_config(2, 10);
    c.depth = 0;
    CensusReport r = u_special_scan(cs, {u}, c);
    CHECK(r.tuples == 1);
    REQUIRE(!r.records.empty());
    CHECK(r.records[0].relations == IntMatrix::from_longs({{1, -1}}));
    CHECK(r.anomalous == 0);
  }
  SUBCASE("lower half plane rejected") {
    const PrecComplex bad(Complex::from_double(0.1, -1.0, 64));
    CHECK_THROWS_AS(u_special_scan(cs, {bad}, small_config(1, 10)), InvalidInput);
  }
}

TEST_CASE("rational points among Heegner images") {
  CorrespondenceSpec cs{pm37(), 1};
  const ParamMap& pm = *pm37();
  ScanConfig c = small_config(1, 7);
  SUBCASE("generator of 37a1") {
    GammaSigmaResult r = gamma_sigma_intersection(cs, {Point::affine(0, 0)}, 10, c);
    CHECK(r.sigma_size == 6);
    CHECK(r.resolved + r.unresolved == r.sigma_size);
    // oracle: the discriminant -7 Heegner point is rational
    HeegnerResult h = heegner_point(pm, Disc(-7));
    REQUIRE(h.points.size() == 1);
    REQUIRE(h.points[0].rational.has_value());
    bool found = false;
    for (const auto& m : r.matches) {
      CHECK(on_curve(E37, m.point));
      Point s = Point::infinity();
      for (size_t i = 0; i < m.coeffs.size(); ++i)
        s = point_add(E37, s, point_mul(E37, Point::affine(0, 0), m.coeffs[i]));
      CHECK(point_add(E37, s, m.torsion) == m.point);
      if (m.s.disc() == -7 && m.point == *h.points[0].rational) found = true;
    }
    CHECK(found);
  }
  SUBCASE("no generators") {
    GammaSigmaResult r = gamma_sigma_intersection(cs, {}, 10, c);
    long zero = 0;
    for (const auto& y : heegner_points_up_to(37, 7, pm.prec))
      if (pm.lattice.lattice_distance(phi_eval(pm, y.cm->value(pm.prec)).z) < 1e-40) ++zero;
    CHECK(static_cast<long>(r.matches.size()) == zero);
    for (const auto& m : r.matches) CHECK(m.point.inf);
  }
  SUBCASE("bad generator") {
    CHECK_THROWS_AS(gamma_sigma_intersection(cs, {Point::affine(1, 1)}, 10, c), InvalidInput);
  }
}
