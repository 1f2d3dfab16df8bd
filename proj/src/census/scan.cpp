#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "cmrel/census/census.hpp"
#include "cmrel/elliptic/torsion.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modular/modpoly.hpp"

namespace cmrel {

namespace {

template <class F>
void parallel_for(size_t count, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(count, 1)));
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < count; i = next++) f(i);
  };
  if (threads <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

// Multisets i_1 <= ... <= i_n of indices below m.
std::vector<std::vector<size_t>> multisets(size_t m, size_t n) {
  std::vector<std::vector<size_t>> out;
  if (m == 0) return out;
  std::vector<size_t> cur(n, 0);
  while (true) {
    out.push_back(cur);
    size_t k = n;
    while (k > 0 && cur[k - 1] == m - 1) --k;
    if (k == 0) break;
    ++cur[k - 1];
    for (size_t j = k; j < n; ++j) cur[j] = cur[k - 1];
  }
  return out;
}

struct UnionFind {
  std::vector<size_t> p;
  explicit UnionFind(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  size_t find(size_t x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void join(size_t a, size_t b) { p[find(a)] = find(b); }
};

struct Image {
  YPoint s;
  std::vector<RelPoint> branches;
  std::vector<ComplexPoint> caller;  // on the caller's model
  bool ok = false;
  std::string error;
};

struct Single {
  bool torsion = false;
  long order = 0;
  std::string error;
};

struct Job {
  std::vector<size_t> idx;
  std::vector<size_t> branch;
};

struct TupleResult {
  bool done = false;
  RelationLattice rl;
  std::string error;
};

using Closure = std::function<SpecialDesc(const std::vector<YPoint>&)>;

std::vector<Image> compute_images(const CorrespondenceSpec& cs, const std::vector<YPoint>& pts,
                                  unsigned threads) {
  std::vector<Image> out(pts.size());
  parallel_for(pts.size(), threads, [&](size_t i) {
    Image& im = out[i];
    im.s = pts[i];
    try {
      auto v = im.s.cm ? v_images(cs, *im.s.cm) : v_images(cs, im.s.tau);
      for (const auto& vi : v) {
        RelPoint rp = RelPoint::numeric(to_minimal_model(*cs.pm, vi.value.point));
        rp.log = vi.value.z;
        im.branches.push_back(rp);
        im.caller.push_back(vi.value.point);
      }
      im.ok = true;
    } catch (const Error& e) {
      im.error = e.what();
    }
  });
  return out;
}

RelationOptions options_of(const ScanConfig& cfg) {
  RelationOptions o;
  o.prec = cfg.prec;
  o.cap = cfg.coeff_cap;
  return o;
}

// unit rows for the coordinates of point i
IntMatrix coordinate_block(long n, bool cm, size_t i) {
  const size_t w = static_cast<size_t>(cm ? 2 * n : n);
  IntMatrix m(0, w);
  for (size_t k = 0; k < (cm ? 2u : 1u); ++k) {
    IntVec v(w, 0);
    v[(cm ? 2 * i : i) + k] = 1;
    m.append_row(v);
  }
  return m;
}

IntMatrix span_of(const RelationLattice& rl, const std::vector<size_t>& coords) {
  IntMatrix m(0, rl.basis.cols());
  for (size_t j : coords) {
    IntMatrix b = coordinate_block(rl.n, rl.end.cm, j);
    for (size_t r = 0; r < b.rows(); ++r) m.append_row(b.row(r));
  }
  return m;
}

// a nonzero relation supported on the given coordinates
bool supported_on(const RelationLattice& rl, const std::vector<size_t>& coords) {
  if (rl.basis.rows() == 0 || coords.empty()) return false;
  return lattice_intersection(rl.basis, span_of(rl, coords)).rows() > 0;
}

bool involved(const RelationLattice& rl, size_t i) {
  const size_t w = rl.end.cm ? 2 : 1;
  for (size_t r = 0; r < rl.basis.rows(); ++r)
    for (size_t k = 0; k < w; ++k)
      if (rl.basis.at(r, w * i + k) != 0) return true;
  return false;
}

std::string tuple_label(const std::vector<YPoint>& t, const std::vector<size_t>& branch) {
  std::ostringstream os;
  for (size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << t[i].label << "#" << branch[i];
  return os.str();
}

GraphRecord point_record(int M, const std::vector<YPoint>& tuple, const std::vector<size_t>& branch,
                         const RelationLattice& rl, const SpecialDesc& S) {
  GraphRecord g;
  g.S = S;
  g.M = M;
  g.tuple = tuple;
  g.branch = branch;
  g.relations = rl.basis;
  g.tags = rl.torsion;
  g.B = smallest_torsion_coset(rl);
  g.dim_W = S.dim();
  g.dependent = g.B.proper();
  g.completeness = rl.completeness_label();
  for (const auto& y : tuple) g.complexity = std::max(g.complexity, y.complexity);
  std::map<std::pair<size_t, size_t>, Witness> best;
  for (const auto& l : S.links) {
    Witness w{l.kind == "equal" || l.kind == "fricke" ? l.kind : "link", l.i, l.j, l.degree};
    auto key = std::make_pair(l.i, l.j);
    auto it = best.find(key);
    if (it == best.end() || w.value < it->second.value) best[key] = w;
  }
  for (const auto& [k, w] : best) g.witnesses.push_back(w);
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (supported_on(rl, {i})) g.witnesses.push_back({"torsion", i, i, tuple[i].complexity});
    // a fixed special point that some relation uses
    if (tuple[i].cm && involved(rl, i)) g.witnesses.push_back({"special", i, i, tuple[i].complexity});
  }
  g.anomalous = g.dependent && g.witnesses.empty();
  return g;
}

// smallest D at which the tuple fails D-independence
long failure_level(const GraphRecord& g) {
  long w = g.complexity;
  for (const auto& y : g.tuple) w = std::min(w, y.complexity);
  for (const auto& l : g.S.links) w = std::min(w, l.degree);
  return w;
}

// Candidate positive-dimensional S through a dependent tuple: free a linked
// pair (one link per kind and pair, the smallest degree), or free one
// coordinate that the relations do not need.
std::vector<SpecialDesc> family_candidates(const GraphRecord& g, const RelationLattice& rl) {
  std::vector<SpecialDesc> out;
  std::map<std::tuple<size_t, size_t, std::string>, Link> chosen;
  for (const auto& l : g.S.links) {
    auto key = std::make_tuple(l.i, l.j, l.kind);
    auto it = chosen.find(key);
    if (it == chosen.end() || l.degree < it->second.degree) chosen[key] = l;
  }
  for (const auto& [k, l] : chosen) {
    SpecialDesc S = g.S;
    S.links = {l};
    S.fixed.erase(l.i);
    S.fixed.erase(l.j);
    out.push_back(S);
  }
  const size_t n = g.tuple.size();
  if (n > 1)
    for (size_t i = 0; i < n; ++i) {
      std::vector<size_t> others;
      for (size_t j = 0; j < n; ++j)
        if (j != i) others.push_back(j);
      if (!supported_on(rl, others)) continue;
      SpecialDesc S = g.S;
      S.links.clear();
      S.fixed.erase(i);
      out.push_back(S);
    }
  return out;
}

void add_families(const CorrespondenceSpec& cs, const ScanConfig& cfg, long level,
                  std::vector<GraphRecord>& records, const std::vector<RelationLattice>& lattices,
                  CensusReport& report) {
  struct Candidate {
    SpecialDesc S;
    size_t rec;
    std::string key;
  };
  std::vector<Candidate> cand;
  std::set<std::string> seen;
  for (size_t r = 0; r < records.size(); ++r)
    for (auto& S : family_candidates(records[r], lattices[r])) {
      std::ostringstream os;
      os << S.to_string() << "|b";
      for (size_t b : records[r].branch) os << b;
      if (!seen.insert(os.str()).second) continue;
      // a family already known to contain this tuple makes the test redundant
      cand.push_back({S, r, os.str()});
    }
  std::vector<std::optional<FamilyResult>> res(cand.size());
  std::vector<std::string> err(cand.size());
  parallel_for(cand.size(), cfg.threads, [&](size_t c) {
    try {
      res[c] = family_dependence_test(cs, cand[c].S, cfg);
    } catch (const Error& e) {
      err[c] = e.what();
    }
  });
  std::vector<GraphRecord> fams;
  for (size_t c = 0; c < cand.size(); ++c) {
    if (!err[c].empty()) {
      report.indeterminate.push_back("family " + cand[c].key + ": " + err[c]);
      continue;
    }
    if (!res[c]) continue;
    const GraphRecord& src = records[cand[c].rec];
    GraphRecord f;
    f.S = cand[c].S;
    f.M = cs.M;
    f.tuple = src.tuple;
    f.branch = res[c]->branch;
    f.relations = res[c]->coset.lattice;
    f.tags = res[c]->tags;
    f.B = res[c]->coset;
    f.dim_W = f.S.dim();
    f.family = true;
    f.dependent = f.B.proper();
    f.complexity = src.complexity;
    f.completeness = "sampled (" + std::to_string(res[c]->samples) + " samples, complete up to cap " +
                     std::to_string(cfg.coeff_cap) + ")";
    bool dup = false;
    for (const auto& o : fams)
      if (o.S.dim() == f.S.dim() && o.relations == f.relations && o.branch == f.branch &&
          special_contains(o.S, f.tuple, level) && special_contains(f.S, o.tuple, level)) {
        dup = true;
        break;
      }
    if (!dup) fams.push_back(std::move(f));
  }
  for (auto& f : fams) records.push_back(std::move(f));
}

std::optional<long> n_star(long n, const CurveQ& Emin, const std::vector<Image>& images,
                           const std::vector<std::vector<Single>>& single, const std::vector<Job>& jobs,
                           const std::vector<TupleResult>& results) {
  if (n > 2) return std::nullopt;
  // elements of Sigma: (image, branch)
  std::vector<std::pair<size_t, size_t>> elems;
  std::map<std::pair<size_t, size_t>, size_t> pos;
  for (size_t i = 0; i < images.size(); ++i)
    if (images[i].ok)
      for (size_t b = 0; b < images[i].branches.size(); ++b) {
        pos[{i, b}] = elems.size();
        elems.push_back({i, b});
      }
  if (elems.empty()) return std::nullopt;
  const Lattice2 L = periods(Emin, images[elems[0].first].branches[0].log->prec());
  auto same = [&](size_t a, size_t b) {
    const auto& za = *images[elems[a].first].branches[elems[a].second].log;
    const auto& zb = *images[elems[b].first].branches[elems[b].second].log;
    return L.lattice_distance(za - zb) < 1e-30;
  };
  UnionFind eq(elems.size());
  for (size_t a = 0; a < elems.size(); ++a)
    for (size_t b = a + 1; b < elems.size(); ++b)
      if (same(a, b)) eq.join(a, b);
  auto is_torsion = [&](size_t e) { return single[elems[e].first][elems[e].second].torsion; };
  std::set<size_t> tors;
  for (size_t e = 0; e < elems.size(); ++e)
    if (is_torsion(e)) tors.insert(eq.find(e));
  if (n == 1) return static_cast<long>(tors.size()) + 1;

  UnionFind dep(elems.size());
  for (size_t j = 0; j < jobs.size(); ++j) {
    if (!results[j].done || results[j].rl.basis.rows() == 0) continue;
    size_t a = pos.at({jobs[j].idx[0], jobs[j].branch[0]}), b = pos.at({jobs[j].idx[1], jobs[j].branch[1]});
    if (is_torsion(a) || is_torsion(b)) continue;
    dep.join(a, b);
  }
  std::map<size_t, std::set<size_t>> clusters;
  for (size_t e = 0; e < elems.size(); ++e)
    if (!is_torsion(e)) clusters[dep.find(e)].insert(eq.find(e));
  size_t largest = 0;
  for (const auto& [k, s] : clusters) largest = std::max(largest, s.size());
  return static_cast<long>(tors.size() + largest) + 1;
}

CensusReport run_pipeline(const CorrespondenceSpec& cs, const ScanConfig& cfg, const std::vector<YPoint>& pts,
                          const Closure& closure, const std::string& kind) {
  const ParamMap& pm = *cs.pm;
  const CurveQ& Emin = pm.mm.curve;
  const long level = pm.N;
  CensusReport report;
  report.kind = kind;
  report.curve = pm.curve.to_string();
  report.level = level;
  report.M = cs.M;
  report.config = cfg;
  report.points = static_cast<long>(pts.size());

  std::vector<Image> images = compute_images(cs, pts, cfg.threads);
  std::vector<size_t> good;
  for (size_t i = 0; i < images.size(); ++i) {
    if (images[i].ok)
      good.push_back(i);
    else
      report.indeterminate.push_back(images[i].s.label + ": " + images[i].error);
  }
  const RelationOptions opt = options_of(cfg);

  std::vector<std::vector<Single>> single(images.size());
  parallel_for(good.size(), cfg.threads, [&](size_t gi) {
    const Image& im = images[good[gi]];
    auto& out = single[good[gi]];
    out.resize(im.branches.size());
    for (size_t b = 0; b < im.branches.size(); ++b) {
      try {
        RelationLattice rl = relation_lattice(Emin, std::vector<RelPoint>{im.branches[b]}, opt);
        if (rl.basis.rows() > 0) {
          out[b].torsion = true;
          out[b].order = std::labs(rl.basis.at(0, 0).get_si()) * rl.torsion.at(0).order();
        }
      } catch (const Error& e) {
        out[b].error = e.what();
      }
    }
  });
  for (size_t i : good)
    for (size_t b = 0; b < single[i].size(); ++b) {
      const std::string lbl = images[i].s.label + "#" + std::to_string(b);
      if (!single[i][b].error.empty())
        report.indeterminate.push_back(lbl + ": " + single[i][b].error);
      else if (single[i][b].torsion)
        report.torsion_images.push_back(lbl + ": order " + std::to_string(single[i][b].order));
    }

  const size_t n = static_cast<size_t>(cfg.n);
  std::vector<Job> jobs;
  for (const auto& ms : multisets(good.size(), n)) {
    std::vector<size_t> idx;
    for (size_t k : ms) idx.push_back(good[k]);
    std::vector<size_t> br(n, 0);
    while (true) {
      jobs.push_back({idx, br});
      size_t k = 0;
      while (k < n && br[k] + 1 == images[idx[k]].branches.size()) br[k++] = 0;
      if (k == n) break;
      ++br[k];
    }
  }
  report.tuples = static_cast<long>(jobs.size());
  std::vector<TupleResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](size_t j) {
    std::vector<RelPoint> rp;
    for (size_t k = 0; k < n; ++k) rp.push_back(images[jobs[j].idx[k]].branches[jobs[j].branch[k]]);
    try {
      results[j].rl = relation_lattice(Emin, rp, opt);
      results[j].done = true;
    } catch (const Error& e) {
      results[j].error = e.what();
    }
  });

  std::vector<GraphRecord> records;
  std::vector<RelationLattice> lattices;
  for (size_t j = 0; j < jobs.size(); ++j) {
    std::vector<YPoint> tuple;
    for (size_t k : jobs[j].idx) tuple.push_back(images[k].s);
    if (!results[j].done) {
      report.indeterminate.push_back(tuple_label(tuple, jobs[j].branch) + ": " + results[j].error);
      continue;
    }
    if (results[j].rl.basis.rows() == 0) {
      ++report.independent;
      continue;
    }
    records.push_back(point_record(cs.M, tuple, jobs[j].branch, results[j].rl, closure(tuple)));
    lattices.push_back(results[j].rl);
  }
  report.independent_label = "independent (complete up to cap " + std::to_string(cfg.coeff_cap) + ")";

  add_families(cs, cfg, level, records, lattices, report);

  std::stable_sort(records.begin(), records.end(), [](const GraphRecord& a, const GraphRecord& b) {
    if (a.family != b.family) return !a.family;
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    return a.key() < b.key();
  });
  exemplary_filter(records, level);
  for (const auto& r : records) {
    if (r.anomalous) ++report.anomalous;
    if (!r.family) report.d_star = std::max(report.d_star.value_or(0), failure_level(r));
  }
  report.records = std::move(records);
  report.n_star = n_star(cfg.n, Emin, images, single, jobs, results);
  return report;
}

}  // namespace

std::vector<YPoint> heegner_points_up_to(long N, long delta_max, Prec prec) {
  std::vector<YPoint> out;
  for (long D = -3; D >= -delta_max; --D) {
    if (!is_valid_discriminant(D)) continue;
    const Disc d(D);
    const std::vector<QuadForm> forms = heegner_forms(d, N);
    if (forms.empty()) continue;
    const long beta = heegner_beta(d, N);
    for (const auto& f : forms) out.push_back(YPoint::from_cm(TauPoint(f), prec));
    if ((2 * N - beta) % (2 * N) != beta)
      for (const auto& f : forms) out.push_back(YPoint::from_cm(TauPoint(QuadForm{f.a, -f.b, f.c}), prec));
  }
  return out;
}

CensusReport scan_tuples(const CorrespondenceSpec& cs, const ScanConfig& cfg) {
  if (!cs.pm) throw InvalidInput("missing parameterization");
  cfg.validate();
  const long level = cs.pm->N;
  std::vector<YPoint> pts = heegner_points_up_to(level, cfg.delta_max, cs.pm->prec);
  Closure closure = [&](const std::vector<YPoint>& t) {
    std::vector<TauPoint> tp;
    for (const auto& y : t) tp.push_back(*y.cm);
    return special_closure_Y(tp, cfg.isog_bound, level);
  };
  return run_pipeline(cs, cfg, pts, closure, "scan");
}

std::vector<YPoint> hecke_orbit_points(const std::vector<PrecComplex>& U, long depth, Prec prec) {
  std::vector<YPoint> pts;
  const long top = std::max<long>(1, depth);
  for (size_t k = 0; k < U.size(); ++k) {
    if (!U[k].im_positive()) throw InvalidInput("U points must lie in the upper half plane");
    for (long N = 1; N <= top; ++N)
      for (const auto& h : cyclic_isogeny_reps(N)) {
        YPoint y;
        y.tau = h.apply(U[k].with_prec(prec));
        y.label = "u" + std::to_string(k) + "*" + h.to_string();
        y.complexity = N;
        y.orbit = static_cast<long>(k);
        y.orbit_map = h;
        pts.push_back(y);
      }
  }
  return pts;
}

SpecialDesc special_closure_U(const std::vector<YPoint>& tuple) {
  SpecialDesc S;
  S.n = static_cast<long>(tuple.size());
  S.base = tuple;
  for (size_t i = 0; i < tuple.size(); ++i) S.fixed[i] = tuple[i].disc();
  for (size_t i = 0; i < tuple.size(); ++i)
    for (size_t j = i + 1; j < tuple.size(); ++j) {
      const YPoint &a = tuple[i], &b = tuple[j];
      if (a.orbit < 0 || a.orbit != b.orbit) continue;
      // h_b adj(h_a) sends h_a u to h_b u
      const MobiusMap& ha = a.orbit_map;
      MobiusMap g = b.orbit_map * MobiusMap{ha.d, -ha.b, -ha.c, ha.a};
      const long c = std::gcd(std::gcd(std::labs(g.a), std::labs(g.b)), std::gcd(std::labs(g.c), std::labs(g.d)));
      g = {g.a / c, g.b / c, g.c / c, g.d / c};
      if (g.a < 0 || (g.a == 0 && g.c < 0)) g = {-g.a, -g.b, -g.c, -g.d};
      S.links.push_back({i, j, g.det(), g, g.det() == 1 ? "equal" : "hecke"});
    }
  return S;
}

CensusReport u_special_scan(const CorrespondenceSpec& cs, const std::vector<PrecComplex>& U,
                            const ScanConfig& cfg) {
  if (!cs.pm) throw InvalidInput("missing parameterization");
  cfg.validate();
  std::vector<YPoint> pts = hecke_orbit_points(U, cfg.depth, cs.pm->prec);
  return run_pipeline(cs, cfg, pts, special_closure_U, "u-special");
}

GammaSigmaResult gamma_sigma_intersection(const CorrespondenceSpec& cs, const std::vector<Point>& generators,
                                          long box, const ScanConfig& cfg) {
  if (!cs.pm) throw InvalidInput("missing parameterization");
  cfg.validate();
  if (box < 0) throw InvalidInput("box must be nonnegative");
  const ParamMap& pm = *cs.pm;
  const CurveQ& E = pm.curve;
  for (const auto& g : generators)
    if (!on_curve(E, g)) throw InvalidInput("point not on curve");
  double size = 1;
  for (size_t i = 0; i < generators.size(); ++i) size *= static_cast<double>(2 * box + 1);
  if (size > 1e6) throw InvalidInput("coefficient box too large");

  // Gamma: sum c_i g_i + T
  const TorsionGroup tg = torsion_subgroup(E);
  struct Elem {
    Point P;
    IntVec c;
    Point T;
  };
  std::vector<Elem> gamma;
  std::vector<long> c(generators.size(), -box);
  while (true) {
    Point s = Point::infinity();
    for (size_t i = 0; i < generators.size(); ++i) s = point_add(E, s, point_mul(E, generators[i], c[i]));
    for (const auto& T : tg.points) gamma.push_back({point_add(E, s, T), IntVec(c.begin(), c.end()), T});
    size_t k = 0;
    while (k < c.size() && c[k] == box) c[k++] = -box;
    if (k == c.size()) break;
    ++c[k];
  }

  GammaSigmaResult out;
  std::vector<YPoint> pts = heegner_points_up_to(pm.N, cfg.delta_max, pm.prec);
  std::vector<Image> images = compute_images(cs, pts, cfg.threads);
  const mpz_class hb = mpz_class(1) << static_cast<unsigned long>(std::max<long>(16, static_cast<long>(pm.prec) / 8));
  for (const auto& im : images) {
    if (!im.ok) {
      out.unresolved += 1;
      continue;
    }
    for (const auto& P : im.caller) {
      ++out.sigma_size;
      std::optional<Point> Q;
      if (P.inf)
        Q = Point::infinity();
      else
        Q = recognize_rational_point(E, P, hb, pm.prec);
      if (!Q) {
        // a non-real coordinate rules out a rational point
        const bool nonreal = abs(P.x.im()).to_double() > P.x.err().to_double() * 4 + 1e-30 ||
                             abs(P.y.im()).to_double() > P.y.err().to_double() * 4 + 1e-30;
        if (nonreal)
          ++out.resolved;
        else
          ++out.unresolved;
        continue;
      }
      ++out.resolved;
      for (const auto& g : gamma)
        if (g.P == *Q) {
          out.matches.push_back({im.s, *Q, g.c, g.T});
          break;
        }
    }
  }
  return out;
}

}  // namespace cmrel
