#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "cmrel/census/census.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modular/modpoly.hpp"

namespace cmrel {

YPoint YPoint::from_cm(const TauPoint& t, Prec prec) {
  YPoint y;
  y.cm = t;
  y.tau = t.value(prec);
  y.label = "D=" + std::to_string(t.disc()) + ":" + t.form().to_string();
  y.complexity = -t.disc();
  return y;
}

std::string Link::to_string() const {
  std::ostringstream os;
  os << kind << "(" << i << "," << j << ";N=" << degree << ";g=" << g.to_string() << ")";
  return os.str();
}

namespace {

struct UnionFind {
  std::vector<size_t> p;
  explicit UnionFind(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  size_t find(size_t x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void join(size_t a, size_t b) { p[find(a)] = find(b); }
};

std::vector<MobiusMap> stabilizer(const QuadForm& reduced) {
  std::vector<MobiusMap> s{MobiusMap::identity()};
  if (reduced == QuadForm{1, 0, 1}) s.push_back({0, -1, 1, 0});
  if (reduced == QuadForm{1, 1, 1}) {
    s.push_back({0, -1, 1, 1});
    s.push_back({-1, -1, 1, 0});
  }
  return s;
}

MobiusMap adjugate(const MobiusMap& g) { return {g.d, -g.b, -g.c, g.a}; }

long mod_floor(long a, long m) { return ((a % m) + m) % m; }

}  // namespace

long SpecialDesc::dim() const {
  UnionFind uf(static_cast<size_t>(n));
  for (const auto& l : links)
    if (!fixed.count(l.i) && !fixed.count(l.j)) uf.join(l.i, l.j);
  long c = 0;
  for (size_t i = 0; i < static_cast<size_t>(n); ++i)
    if (!fixed.count(i) && uf.find(i) == i) ++c;
  return c;
}

std::string SpecialDesc::to_string() const {
  std::ostringstream os;
  os << "n=" << n << ";dim=" << dim() << ";fixed={";
  bool first = true;
  for (const auto& [i, d] : fixed) {
    os << (first ? "" : ",") << i << ":" << base.at(i).label;
    first = false;
  }
  os << "};links={";
  first = true;
  for (const auto& l : links) {
    os << (first ? "" : ",") << l.to_string();
    first = false;
  }
  os << "}";
  return os.str();
}

std::optional<MobiusMap> gamma0_equivalence(const TauPoint& a, const TauPoint& b, long N) {
  if (N < 1) throw InvalidInput("level must be positive");
  MobiusMap ga, gb;
  const QuadForm ra = reduce_form(a.form(), &ga), rb = reduce_form(b.form(), &gb);
  if (ra != rb) return std::nullopt;
  const MobiusMap gbi = gb.inverse();
  for (const auto& s : stabilizer(ra)) {
    MobiusMap g = gbi * s * ga;
    if (g.c % N == 0) return g;
  }
  return std::nullopt;
}

std::optional<MobiusMap> isogeny_link(const TauPoint& a, const TauPoint& b, long deg) {
  if (deg < 1) throw InvalidInput("degree must be positive");
  MobiusMap gb;
  const QuadForm rb = reduce_form(b.form(), &gb);
  const MobiusMap gbi = gb.inverse();
  for (const auto& h : cyclic_isogeny_reps(deg)) {
    QuadForm f = transform_form(a.form(), h);
    if (f.disc() != b.disc()) continue;
    MobiusMap g1;
    if (reduce_form(f, &g1) == rb) return gbi * g1 * h;
  }
  return std::nullopt;
}

SpecialDesc special_closure_Y(const std::vector<TauPoint>& tuple, long isogeny_bound, long level) {
  if (isogeny_bound < 1 || isogeny_bound > kMaxModPolyLevel)
    throw InvalidInput("isogeny bound out of supported range");
  SpecialDesc S;
  S.n = static_cast<long>(tuple.size());
  for (size_t i = 0; i < tuple.size(); ++i) {
    S.fixed[i] = tuple[i].disc();
    S.base.push_back(YPoint::from_cm(tuple[i], 64));
  }
  for (size_t i = 0; i < tuple.size(); ++i)
    for (size_t j = i + 1; j < tuple.size(); ++j) {
      const TauPoint &a = tuple[i], &b = tuple[j];
      bool equal = false;
      if (auto g = gamma0_equivalence(a, b, level)) {
        S.links.push_back({i, j, 1, *g, "equal"});
        equal = true;
      }
      for (long d = equal ? 2 : 1; d <= isogeny_bound; ++d)
        if (auto g = isogeny_link(a, b, d)) S.links.push_back({i, j, d, *g, "isogeny"});
      if (level > 1) {
        const MobiusMap w{0, -1, level, 0};
        if (auto g = gamma0_equivalence(TauPoint(transform_form(a.form(), w)), b, level))
          S.links.push_back({i, j, level, *g * w, "fricke"});
      }
    }
  return S;
}

namespace {

bool same_point(const YPoint& a, const YPoint& b, long level) {
  if (a.cm && b.cm) return gamma0_equivalence(*a.cm, *b.cm, level).has_value();
  if (a.cm || b.cm) return false;
  return a.label == b.label;
}

bool link_holds(const Link& l, const std::vector<YPoint>& t, long level) {
  const YPoint &a = t.at(l.i), &b = t.at(l.j);
  if (a.cm && b.cm) {
    if (l.g.det() <= 0) return false;
    QuadForm f = transform_form(a.cm->form(), l.g);
    if (f.disc() != b.cm->disc()) return false;
    return gamma0_equivalence(TauPoint(f), *b.cm, level).has_value();
  }
  PrecComplex d = l.g.apply(a.tau) - b.tau;
  return d.abs_upper().to_double() < 1e-20;
}

}  // namespace

bool special_contains(const SpecialDesc& S, const std::vector<YPoint>& tuple, long level) {
  if (static_cast<long>(tuple.size()) != S.n) return false;
  for (const auto& [i, d] : S.fixed)
    if (!same_point(S.base.at(i), tuple.at(i), level)) return false;
  for (const auto& l : S.links)
    if (!link_holds(l, tuple, level)) return false;
  return true;
}

void ScanConfig::validate() const {
  if (n < 1 || n > 4) throw InvalidInput("n out of range");
  if (delta_max < 1) throw InvalidInput("delta-max must be positive");
  if (isog_bound < 1 || isog_bound > kMaxModPolyLevel) throw InvalidInput("isogeny bound out of supported range");
  if (coeff_cap < 1) throw InvalidInput("coefficient cap must be positive");
  if (prec < 64) throw InvalidInput("precision must be at least 64 bits");
  if (samples < 2) throw InvalidInput("at least two samples are needed");
  if (depth < 0) throw InvalidInput("depth must be nonnegative");
}

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RelationOptions relation_options(const ScanConfig& cfg) {
  RelationOptions o;
  o.prec = cfg.prec;
  o.cap = cfg.coeff_cap;
  return o;
}

struct Sample {
  std::vector<std::vector<VImage>> images;  // per coordinate, per branch
};

// Hermite basis with the torsion values of its rows, from one relation lattice
struct TaggedLattice {
  IntMatrix basis;
  std::vector<TorsionTag> tags;
};

std::vector<TorsionTag> tags_in(const TaggedLattice& in, const IntMatrix& rows) {
  std::vector<TorsionTag> out;
  for (size_t r = 0; r < rows.rows(); ++r) {
    IntVec c;
    if (!solve_integral(in.basis, rows.row(r), c)) throw Indeterminate("sampling failure");
    const long t = in.tags.empty() ? 1 : in.tags.front().t;
    long a = 0, b = 0;
    for (size_t j = 0; j < c.size(); ++j) {
      mpz_class cj = c[j] % t;
      a = mod_floor(a + cj.get_si() * in.tags[j].a, t);
      b = mod_floor(b + cj.get_si() * in.tags[j].b, t);
    }
    out.push_back({a, b, t, std::nullopt});
  }
  return out;
}

}  // namespace

std::optional<FamilyResult> family_dependence_test(const CorrespondenceSpec& cs, const SpecialDesc& S,
                                                   const ScanConfig& cfg) {
  if (!cs.pm) throw InvalidInput("missing parameterization");
  const ParamMap& pm = *cs.pm;
  const size_t n = static_cast<size_t>(S.n);
  if (S.dim() < 1) throw InvalidInput("family needs a free coordinate");
  const int k = std::max(cfg.samples, 2);

  // spanning forest of the links among free coordinates
  std::vector<std::vector<std::pair<size_t, MobiusMap>>> adj(n);
  for (const auto& l : S.links) {
    if (S.fixed.count(l.i) || S.fixed.count(l.j)) continue;
    adj[l.i].push_back({l.j, l.g});
    adj[l.j].push_back({l.i, adjugate(l.g)});
  }

  std::mt19937_64 rng(cfg.seed ^ fnv1a(S.to_string()));
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.6, 1.4);
  const Prec p = pm.prec;
  std::vector<Sample> samples(static_cast<size_t>(k));
  for (auto& smp : samples) {
    std::vector<std::optional<PrecComplex>> tau(n);
    for (const auto& [i, d] : S.fixed) {
      const YPoint& b = S.base.at(i);
      tau[i] = b.cm ? b.cm->value(p) : b.tau.with_prec(p);
    }
    for (size_t r = 0; r < n; ++r) {
      if (tau[r]) continue;
      tau[r] = PrecComplex(Complex::from_double(ux(rng), uy(rng), p));
      std::vector<size_t> stack{r};
      while (!stack.empty()) {
        size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, g] : adj[u])
          if (!tau[v]) {
            tau[v] = g.apply(*tau[u]);
            stack.push_back(v);
          }
      }
    }
    for (size_t i = 0; i < n; ++i) smp.images.push_back(v_images(cs, *tau[i]));
  }

  const size_t nb = samples.front().images.front().size();
  std::vector<size_t> branch(n, 0);
  const RelationOptions opt = relation_options(cfg);
  bool cm = false;
  while (true) {
    std::vector<TaggedLattice> lat;
    for (const auto& smp : samples) {
      std::vector<RelPoint> pts;
      for (size_t i = 0; i < n; ++i) {
        const PhiValue& v = smp.images[i][branch[i]].value;
        RelPoint rp = RelPoint::numeric(to_minimal_model(pm, v.point));
        rp.log = v.z;
        pts.push_back(rp);
      }
      RelationLattice rl = relation_lattice(pm.mm.curve, pts, opt);
      cm = rl.end.cm;
      lat.push_back({rl.basis, rl.torsion});
    }
    IntMatrix head = lat.front().basis;
    for (int s = 1; s + 1 < k; ++s) head = lattice_intersection(head, lat[static_cast<size_t>(s)].basis);
    IntMatrix all = lattice_intersection(head, lat.back().basis);
    if (!(head == all)) throw Indeterminate("unstable family lattice");
    if (all.rows() > 0) {
      std::vector<TorsionTag> tags = tags_in(lat.front(), all);
      for (size_t s = 1; s < lat.size(); ++s) {
        std::vector<TorsionTag> other = tags_in(lat[s], all);
        for (size_t r = 0; r < tags.size(); ++r)
          if (other[r].a != tags[r].a || other[r].b != tags[r].b) throw Indeterminate("sampling failure");
      }
      FamilyResult fr;
      fr.coset.n = S.n;
      fr.coset.lattice = all;
      const long rank = static_cast<long>(all.rows()) / (cm ? 2 : 1);
      fr.coset.dim = S.n - rank;
      for (const auto& t : tags) fr.coset.t = std::lcm(fr.coset.t, t.order());
      fr.tags = tags;
      fr.branch = branch;
      fr.samples = k;
      return fr;
    }
    size_t i = 0;
    while (i < n && branch[i] + 1 == nb) branch[i++] = 0;
    if (i == n) break;
    ++branch[i];
  }
  return std::nullopt;
}

std::string Witness::to_string() const {
  std::ostringstream os;
  os << kind << "(" << i;
  if (kind != "torsion") os << "," << j;
  os << ";" << value << ")";
  return os.str();
}

std::string GraphRecord::key() const {
  std::ostringstream os;
  os << (family ? "F|" : "P|");
  for (size_t i = 0; i < tuple.size(); ++i) os << (i ? "," : "") << tuple[i].label;
  os << "|b";
  for (size_t b : branch) os << b;
  if (family) os << "|" << S.to_string();
  return os.str();
}

long defect(const GraphRecord& gr) { return gr.S.dim() + gr.B.dim - gr.dim_W; }

bool dominates(const GraphRecord& F, const GraphRecord& A, long level) {
  if (F.S.dim() <= A.S.dim()) return false;
  if (!F.branch.empty() && !A.branch.empty() && F.branch != A.branch) return false;
  if (!special_contains(F.S, A.tuple, level)) return false;
  if (A.relations.rows() == 0) return true;
  if (F.relations.rows() == 0) return false;
  TaggedLattice f{F.relations, F.tags};
  std::vector<TorsionTag> implied;
  try {
    implied = tags_in(f, A.relations);
  } catch (const Indeterminate&) {
    return false;  // some relation of A does not hold on F
  }
  for (size_t r = 0; r < implied.size(); ++r) {
    const TorsionTag& t = A.tags.at(r);
    if (mod_floor(implied[r].a - t.a, t.t) != 0 || mod_floor(implied[r].b - t.b, t.t) != 0) return false;
  }
  return true;
}

std::vector<GraphRecord> exemplary_filter(std::vector<GraphRecord>& records, long level) {
  for (size_t a = 0; a < records.size(); ++a) {
    records[a].exemplary = true;
    records[a].dominated_by = -1;
    for (size_t f = 0; f < records.size(); ++f) {
      if (f == a || !dominates(records[f], records[a], level)) continue;
      records[a].exemplary = false;
      records[a].dominated_by = static_cast<long>(f);
      break;
    }
  }
  std::vector<GraphRecord> out;
  for (const auto& r : records)
    if (r.exemplary) out.push_back(r);
  return out;
}

}  // namespace cmrel
