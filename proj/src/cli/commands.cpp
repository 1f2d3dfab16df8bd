#include "cmrel/cli/commands.hpp"

#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cmrel/cli/cache.hpp"
#include "cmrel/error.hpp"
#include "cmrel/modular/modpoly.hpp"

namespace cmrel::cli {

using nlohmann::json;

void RunConfig::validate() const {
  if (prec < 64) throw InvalidInput("precision must be at least 64 bits");
  if (hecke < 1) throw InvalidInput("Hecke degree must be positive");
  if (box < 0) throw InvalidInput("box must be nonnegative");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw InvalidInput("bad rational " + s);
  q.canonicalize();
  if (q.get_den() == 0) throw InvalidInput("bad rational " + s);
  return q;
}

bool parse_long(const std::string& s, long& v) {
  try {
    size_t pos = 0;
    v = std::stol(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

Real parse_decimal(const std::string& s, Prec prec) {
  if (s.empty() || s.find_first_not_of("0123456789+-.eE") != std::string::npos)
    throw InvalidInput("bad decimal " + s);
  return Real::from_string(s, prec);
}

std::shared_ptr<const ParamMap> param_map(const std::string& curve, const RunConfig& cfg) {
  return std::make_shared<const ParamMap>(make_param_map(CurveQ::parse(curve), cfg.prec));
}

json provenance_base(const RunConfig& cfg) {
  json p;
  p["precision"] = cfg.prec;
  return p;
}

json scan_bounds(const RunConfig& cfg) {
  json b;
  b["n"] = cfg.scan.n;
  b["delta_max"] = cfg.scan.delta_max;
  b["isog_bound"] = cfg.scan.isog_bound;
  b["coeff_cap"] = cfg.scan.coeff_cap;
  b["samples"] = cfg.scan.samples;
  b["depth"] = cfg.scan.depth;
  b["hecke"] = cfg.hecke;
  return b;
}

ScanConfig scan_config(const RunConfig& cfg) {
  ScanConfig s = cfg.scan;
  s.prec = cfg.prec;
  return s;
}

json tag_json(const TorsionTag& t) {
  json j;
  j["a"] = t.a;
  j["b"] = t.b;
  j["t"] = t.t;
  j["order"] = t.order();
  j["point"] = t.point ? point_json(*t.point) : json(nullptr);
  return j;
}

std::string row_text(const IntMatrix& m) {
  std::string s;
  for (size_t i = 0; i < m.rows(); ++i) {
    s += i ? ";" : "";
    for (size_t k = 0; k < m.cols(); ++k) s += (k ? " " : "") + m.at(i, k).get_str();
  }
  return s;
}

CommandResult guarded(const std::function<Report()>& f) {
  CommandResult r;
  try {
    r.report = f();
  } catch (const InvalidInput& e) {
    r.code = kInvalidInput;
    r.error = e.what();
  } catch (const Indeterminate& e) {
    r.code = kIndeterminate;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.code = kInternalError;
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<Point> parse_points(const std::string& s) {
  std::vector<Point> out;
  for (const auto& part : split(s, ';')) {
    if (part.empty()) continue;
    if (part == "O" || part == "0") {
      out.push_back(Point::infinity());
      continue;
    }
    std::string t = part;
    if (t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    auto xy = split(t, ',');
    if (xy.size() != 2) throw InvalidInput("bad point " + part);
    out.push_back(Point::affine(parse_rational(xy[0]), parse_rational(xy[1])));
  }
  return out;
}

std::variant<TauPoint, PrecComplex> parse_tau(const std::string& s, Prec prec) {
  auto parts = split(s, ',');
  if (parts.size() == 3) {
    long a, b, c;
    if (!parse_long(parts[0], a) || !parse_long(parts[1], b) || !parse_long(parts[2], c))
      throw InvalidInput("bad form " + s);
    QuadForm f{a, b, c};
    if (a <= 0 || f.disc() >= 0 || !f.is_primitive()) throw InvalidInput("form must be primitive positive definite");
    return TauPoint(f);
  }
  if (parts.size() == 2) {
    PrecComplex z(Complex(parse_decimal(parts[0], prec), parse_decimal(parts[1], prec)));
    if (!z.im_positive()) throw InvalidInput("tau must lie in the upper half plane");
    return z;
  }
  throw InvalidInput("bad tau " + s);
}

std::vector<PrecComplex> parse_complex_list(const std::string& s, Prec prec) {
  std::vector<PrecComplex> out;
  for (const auto& part : split(s, ';')) {
    if (part.empty()) continue;
    auto v = parse_tau(part, prec);
    if (!std::holds_alternative<PrecComplex>(v)) throw InvalidInput("U points are given as decimals");
    out.push_back(std::get<PrecComplex>(v));
  }
  if (out.empty()) throw InvalidInput("empty point list");
  return out;
}

CommandResult cmd_classpoly(long disc, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    const Disc d(disc);
    IntPoly p = hilbert_class_poly(d, cfg.prec);
    Report r;
    r.provenance = provenance_base(cfg);
    r.body["disc"] = disc;
    r.body["class_number"] = p.degree();
    r.body["poly"] = p.to_string("X");
    json c = json::array();
    r.columns = {"degree", "coefficient"};
    for (size_t i = 0; i < p.coeffs().size(); ++i) {
      c.push_back(p.coeffs()[i].get_str());
      r.rows.push_back({std::to_string(i), p.coeffs()[i].get_str()});
    }
    r.body["coeffs"] = c;
    return r;
  });
}

CommandResult cmd_modpoly(long N, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    if (N < 1 || N > kMaxModPolyLevel) throw InvalidInput("level out of supported range");
    const ModPoly& mp = modular_polynomial(static_cast<int>(N));
    Report r;
    r.provenance = provenance_base(cfg);
    r.body["N"] = N;
    r.body["degree"] = mp.poly.deg_x();
    json terms = json::array();
    r.columns = {"i", "j", "coefficient"};
    for (int i = 0; i <= mp.poly.deg_x(); ++i)
      for (int j = 0; j <= i && j <= mp.poly.deg_y(); ++j) {
        const mpz_class& c = mp.poly.at(i, j);
        if (c == 0) continue;
        terms.push_back(json::array({i, j, c.get_str()}));
        r.rows.push_back({std::to_string(i), std::to_string(j), c.get_str()});
      }
    r.body["terms"] = terms;
    r.body["symmetric"] = mp.poly.is_symmetric();
    return r;
  });
}

CommandResult cmd_heegner(const std::string& curve, long disc, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    auto pm = param_map(curve, cfg);
    HeegnerResult h = heegner_point(*pm, Disc(disc));
    Report r;
    r.provenance = provenance_base(cfg);
    r.body["curve"] = pm->curve.to_string();
    r.body["level"] = pm->N;
    r.body["disc"] = h.disc;
    r.body["class_number"] = h.class_number;
    json pts = json::array();
    r.columns = {"form", "x_re", "x_im", "y_re", "y_im", "x_minpoly", "rational"};
    for (const auto& e : h.points) {
      json p;
      p["form"] = e.tau.form().to_string();
      p["z"] = ball_json(e.z);
      p["point"] = complex_point_json(e.point);
      p["x_minpoly"] = e.x_minpoly ? json(e.x_minpoly->to_string("X")) : json(nullptr);
      p["rational"] = e.rational ? point_json(*e.rational) : json(nullptr);
      pts.push_back(p);
      std::vector<std::string> row{e.tau.form().to_string()};
      if (e.point.inf) {
        row.insert(row.end(), {"inf", "", "", ""});
      } else {
        for (const auto* c : {&e.point.x, &e.point.y}) {
          row.push_back(format_real(c->re(), c->err(), c->prec()));
          row.push_back(format_real(c->im(), c->err(), c->prec()));
        }
      }
      row.push_back(e.x_minpoly ? e.x_minpoly->to_string("X") : "");
      row.push_back(e.rational ? e.rational->to_string() : "");
      r.rows.push_back(row);
    }
    r.body["points"] = pts;
    r.body["trace_z"] = ball_json(h.trace_z);
    r.body["trace"] = complex_point_json(h.trace);
    r.body["trace_rational"] = h.trace_rational ? point_json(*h.trace_rational) : json(nullptr);
    return r;
  });
}

CommandResult cmd_param_eval(const std::string& curve, const std::string& tau, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    auto pm = param_map(curve, cfg);
    auto t = parse_tau(tau, cfg.prec);
    const PrecComplex z = std::holds_alternative<TauPoint>(t) ? std::get<TauPoint>(t).value(cfg.prec)
                                                                : std::get<PrecComplex>(t);
    PhiValue v = phi_eval(*pm, z);
    Report r;
    r.provenance = provenance_base(cfg);
    r.body["curve"] = pm->curve.to_string();
    r.body["level"] = pm->N;
    r.body["tau"] = ball_json(z);
    r.body["z"] = ball_json(v.z);
    r.body["point"] = complex_point_json(v.point);
    r.body["torsion_order"] = torsion_order_of(pm->lattice, v.z);
    r.columns = {"coordinate", "re", "im", "err"};
    for (const auto& [name, b] : {std::pair<std::string, const PrecComplex*>{"z", &v.z}, {"x", &v.point.x},
                                  {"y", &v.point.y}}) {
      if (name != "z" && v.point.inf) continue;
      json j = ball_json(*b);
      r.rows.push_back({name, j["re"], j["im"], j["err"]});
    }
    return r;
  });
}

CommandResult cmd_relations(const std::string& curve, const std::string& points, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    const CurveQ E = CurveQ::parse(curve);
    std::vector<Point> pts = parse_points(points);
    if (pts.empty()) throw InvalidInput("no points given");
    RelationOptions opt;
    opt.prec = std::max<Prec>(128, cfg.prec / 2);
    opt.cap = cfg.scan.coeff_cap;
    RelationLattice rl = relation_lattice(E, pts, opt);
    CosetDesc c = smallest_torsion_coset(rl);
    Report r;
    r.provenance = provenance_base(cfg);
    r.provenance["completeness"] = rl.completeness_label();
    r.provenance["coeff_bound"] = rl.coeff_bound.get_str();
    r.body["curve"] = E.to_string();
    json pj = json::array();
    for (const auto& P : pts) pj.push_back(point_json(P));
    r.body["points"] = pj;
    r.body["end"] = rl.end.to_string();
    r.body["basis"] = matrix_json(rl.basis);
    json tags = json::array();
    for (const auto& t : rl.torsion) tags.push_back(tag_json(t));
    r.body["torsion"] = tags;
    r.body["exact_relations"] = matrix_json(rl.exact_relations(E));
    r.body["rank"] = rl.rank();
    r.body["coset"] = {{"dim", c.dim}, {"t", c.t}, {"proper", c.proper()}};
    r.columns = {"row", "coefficients", "torsion_order"};
    for (size_t i = 0; i < rl.basis.rows(); ++i) {
      IntMatrix one(0, rl.basis.cols());
      one.append_row(rl.basis.row(i));
      r.rows.push_back({std::to_string(i), row_text(one), std::to_string(rl.torsion[i].order())});
    }
    return r;
  });
}

Report census_report(const CensusReport& c) {
  Report r;
  r.body["kind"] = c.kind;
  r.body["curve"] = c.curve;
  r.body["level"] = c.level;
  r.body["M"] = c.M;
  r.body["points"] = c.points;
  r.body["tuples"] = c.tuples;
  r.body["independent"] = c.independent;
  r.body["independent_label"] = c.independent_label;
  r.body["torsion_images"] = c.torsion_images;
  r.body["indeterminate"] = c.indeterminate;
  r.body["d_star"] = c.d_star ? json(*c.d_star) : json(nullptr);
  r.body["n_star"] = c.n_star ? json(*c.n_star) : json(nullptr);
  r.body["anomalous"] = c.anomalous;
  json recs = json::array();
  r.columns = {"key",      "family",       "dim_S",     "relations",    "coset_dim", "coset_t",  "defect",
               "dependent", "exemplary",   "dominated_by", "witnesses", "anomalous", "complexity", "completeness"};
  for (const auto& g : c.records) {
    json j;
    j["key"] = g.key();
    j["family"] = g.family;
    std::vector<std::string> labels;
    for (const auto& y : g.tuple) labels.push_back(y.label);
    j["tuple"] = labels;
    j["branch"] = g.branch;
    j["S"] = g.S.to_string();
    j["dim_S"] = g.S.dim();
    j["relations"] = matrix_json(g.relations);
    json tags = json::array();
    for (const auto& t : g.tags) tags.push_back(tag_json(t));
    j["tags"] = tags;
    j["coset"] = {{"dim", g.B.dim}, {"t", g.B.t}, {"proper", g.B.proper()}};
    j["dim_W"] = g.dim_W;
    j["defect"] = defect(g);
    j["dependent"] = g.dependent;
    j["exemplary"] = g.exemplary;
    j["dominated_by"] = g.dominated_by;
    std::vector<std::string> w;
    for (const auto& x : g.witnesses) w.push_back(x.to_string());
    j["witnesses"] = w;
    j["anomalous"] = g.anomalous;
    j["complexity"] = g.complexity;
    j["completeness"] = g.completeness;
    recs.push_back(j);
    std::string ws;
    for (size_t i = 0; i < w.size(); ++i) ws += (i ? " " : "") + w[i];
    r.rows.push_back({g.key(), g.family ? "1" : "0", std::to_string(g.S.dim()), row_text(g.relations),
                      std::to_string(g.B.dim), std::to_string(g.B.t), std::to_string(defect(g)),
                      g.dependent ? "1" : "0", g.exemplary ? "1" : "0", std::to_string(g.dominated_by), ws,
                      g.anomalous ? "1" : "0", std::to_string(g.complexity), g.completeness});
  }
  r.body["records"] = recs;
  return r;
}

namespace {

Report census_with_provenance(const CensusReport& c, const RunConfig& cfg) {
  Report r = census_report(c);
  r.provenance = provenance_base(cfg);
  r.provenance["bounds"] = scan_bounds(cfg);
  r.provenance["cap_label"] = c.independent_label;
  r.provenance["anomalous"] = c.anomalous;
  r.provenance["exemplary_scope"] = "exemplary within bounds: |disc| <= " + std::to_string(cfg.scan.delta_max) +
                                    ", isogeny degree <= " + std::to_string(cfg.scan.isog_bound) +
                                    ", domination by lattice containment";
  r.provenance["seed"] = cfg.scan.seed;
  return r;
}

}  // namespace

CommandResult cmd_scan(const std::string& curve, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    CorrespondenceSpec cs{param_map(curve, cfg), cfg.hecke};
    return census_with_provenance(scan_tuples(cs, scan_config(cfg)), cfg);
  });
}

CommandResult cmd_census_u(const std::string& curve, const std::string& U, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    std::vector<PrecComplex> u = parse_complex_list(U, cfg.prec);
    CorrespondenceSpec cs{param_map(curve, cfg), cfg.hecke};
    return census_with_provenance(u_special_scan(cs, u, scan_config(cfg)), cfg);
  });
}

CommandResult cmd_gamma(const std::string& curve, const std::string& generators, const RunConfig& cfg) {
  return guarded([&] {
    cfg.validate();
    std::vector<Point> gens = parse_points(generators);
    CorrespondenceSpec cs{param_map(curve, cfg), cfg.hecke};
    GammaSigmaResult g = gamma_sigma_intersection(cs, gens, cfg.box, scan_config(cfg));
    Report r;
    r.provenance = provenance_base(cfg);
    r.provenance["bounds"] = scan_bounds(cfg);
    r.provenance["bounds"]["box"] = cfg.box;
    r.body["curve"] = cs.pm->curve.to_string();
    r.body["sigma_size"] = g.sigma_size;
    r.body["resolved"] = g.resolved;
    r.body["unresolved"] = g.unresolved;
    json m = json::array();
    r.columns = {"point", "label", "coefficients", "torsion"};
    for (const auto& x : g.matches) {
      json j;
      j["label"] = x.s.label;
      j["point"] = point_json(x.point);
      j["coeffs"] = x.coeffs.empty() ? json::array() : json(nullptr);
      for (const auto& c : x.coeffs) j["coeffs"].push_back(c.get_str());
      j["torsion"] = point_json(x.torsion);
      m.push_back(j);
      std::string cs_text;
      for (size_t i = 0; i < x.coeffs.size(); ++i) cs_text += (i ? " " : "") + x.coeffs[i].get_str();
      r.rows.push_back({x.point.to_string(), x.s.label, cs_text, x.torsion.to_string()});
    }
    r.body["matches"] = m;
    r.body["count"] = g.matches.size();
    return r;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"CM points on modular curves and linear relations among their images"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.cache_dir = default_cache_dir();
  std::string format = "json";
  app.add_option("--prec", cfg.prec, "working precision in bits")->capture_default_str();
  app.add_option("--cache-dir", cfg.cache_dir, std::string("disk cache directory (default $") + kCacheDirEnv + ")");
  app.add_option("--format", format, "json or csv")->capture_default_str();

  auto scan_flags = [&](CLI::App* s) {
    s->add_option("--n", cfg.scan.n, "tuple length")->capture_default_str();
    s->add_option("--delta-max", cfg.scan.delta_max, "largest |disc|")->capture_default_str();
    s->add_option("--isog-bound", cfg.scan.isog_bound, "largest isogeny degree searched")->capture_default_str();
    s->add_option("--coeff-cap", cfg.scan.coeff_cap, "coefficient cap without a height bound")->capture_default_str();
    s->add_option("--samples", cfg.scan.samples, "samples per family")->capture_default_str();
    s->add_option("--depth", cfg.scan.depth, "largest Hecke orbit degree")->capture_default_str();
    s->add_option("--threads", cfg.scan.threads, "worker threads (0: all cores)")->capture_default_str();
    s->add_option("--hecke", cfg.hecke, "degree of the Hecke correspondence")->capture_default_str();
  };

  long disc = 0, level = 0;
  std::string curve, tau, points, U;
  std::function<CommandResult()> action;
  std::string name;

  auto* cp = app.add_subcommand("classpoly", "Hilbert class polynomial");
  cp->add_option("disc", disc)->required()->allow_extra_args(false);
  cp->callback([&] { name = "classpoly"; action = [&] { return cmd_classpoly(disc, cfg); }; });

  auto* mp = app.add_subcommand("modpoly", "classical modular polynomial");
  mp->add_option("N", level)->required();
  mp->callback([&] { name = "modpoly"; action = [&] { return cmd_modpoly(level, cfg); }; });

  auto* hg = app.add_subcommand("heegner", "Heegner points of a discriminant");
  hg->add_option("curve", curve, "a1,a2,a3,a4,a6")->required();
  hg->add_option("disc", disc)->required();
  hg->callback([&] { name = "heegner"; action = [&] { return cmd_heegner(curve, disc, cfg); }; });

  auto* pe = app.add_subcommand("param-eval", "modular parameterization at tau");
  pe->add_option("curve", curve)->required();
  pe->add_option("tau", tau, "a,b,c (CM point of a form) or re,im")->required();
  pe->callback([&] { name = "param-eval"; action = [&] { return cmd_param_eval(curve, tau, cfg); }; });

  auto* rl = app.add_subcommand("relations", "relation lattice of rational points");
  rl->add_option("curve", curve)->required();
  rl->add_option("points", points, "(x,y);(x,y);...")->required();
  rl->add_option("--coeff-cap", cfg.scan.coeff_cap, "coefficient cap without a height bound");
  rl->callback([&] { name = "relations"; action = [&] { return cmd_relations(curve, points, cfg); }; });

  auto* sc = app.add_subcommand("scan", "census of Heegner tuples");
  sc->add_option("curve", curve)->required();
  scan_flags(sc);
  sc->callback([&] { name = "scan"; action = [&] { return cmd_scan(curve, cfg); }; });

  auto* cu = app.add_subcommand("census-u", "census of Hecke orbits of given points");
  cu->add_option("curve", curve)->required();
  cu->add_option("U", U, "re,im;re,im;...")->required();
  scan_flags(cu);
  cu->callback([&] { name = "census-u"; action = [&] { return cmd_census_u(curve, U, cfg); }; });

  auto* gm = app.add_subcommand("gamma", "Heegner images in a finitely generated subgroup");
  gm->add_option("curve", curve)->required();
  gm->add_option("generators", points, "(x,y);...; empty for the torsion subgroup")->required();
  gm->add_option("--box", cfg.box, "coefficient box")->capture_default_str();
  scan_flags(gm);
  gm->callback([&] { name = "gamma"; action = [&] { return cmd_gamma(curve, points, cfg); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  std::shared_ptr<PersistentCache> cache;
  try {
    cfg.format = parse_format(format);
    if (!cfg.cache_dir.empty()) cache = std::make_shared<JsonlCache>(cfg.cache_dir);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  set_persistent_cache(cache);
  CommandResult res = action();
  set_persistent_cache(nullptr);
  if (res.code != kOk) {
    err << "error: " << res.error << "\n";
    return res.code;
  }
  out << render(name, res.report, cfg.format);
  return kOk;
}

}  // namespace cmrel::cli
