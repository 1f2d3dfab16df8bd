#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmrel/modparam/parameterization.hpp"
#include "cmrel/quadforms/quadforms.hpp"
#include "cmrel/relations/relations.hpp"

namespace cmrel {

/// A point of Y = X_0(N): a CM point given exactly, or a point of the upper
/// half plane given numerically (Hecke orbits of non-CM base points).
struct YPoint {
  std::optional<TauPoint> cm;
  PrecComplex tau;
  std::string label;
  long complexity = 0;  // |disc| for CM points, the isogeny degree for orbit points
  long orbit = -1;      // index of the base point u for orbit points
  MobiusMap orbit_map;  // the point is orbit_map(u)
  long disc() const { return cm ? cm->disc() : 0; }
  static YPoint from_cm(const TauPoint& t, Prec prec);
};

/// s_j = g s_i on the upper half plane.
struct Link {
  size_t i = 0, j = 0;
  long degree = 1;  // degree of the cyclic isogeny between the j-invariants
  MobiusMap g;
  std::string kind;  // "equal", "isogeny", "fricke", "hecke"
  std::string to_string() const;
};

/// Special (or U-special) subvariety of Y^n: fixed coordinates plus a link
/// graph on the free ones. A dimension-zero description records the links
/// found between its coordinates.
struct SpecialDesc {
  long n = 0;
  std::map<size_t, long> fixed;  // coordinate -> discriminant (0 for non-CM)
  std::vector<YPoint> base;      // values of the fixed coordinates (size n)
  std::vector<Link> links;
  long dim() const;
  std::string to_string() const;
};

/// Element g of Gamma_0(N) with g(a) = b, if any.
std::optional<MobiusMap> gamma0_equivalence(const TauPoint& a, const TauPoint& b, long N);

/// Matrix g primitive of determinant deg with g(a) = b exactly, if any.
std::optional<MobiusMap> isogeny_link(const TauPoint& a, const TauPoint& b, long deg);

/// All coordinates fixed; links for every pair: Gamma_0(level)-equality,
/// cyclic isogenies of degree <= isogeny_bound, and the Fricke involution.
SpecialDesc special_closure_Y(const std::vector<TauPoint>& tuple, long isogeny_bound, long level = 1);

/// True when the tuple lies on S (fixed coordinates equal up to Gamma_0(N),
/// links satisfied). Exact for CM tuples, numeric otherwise.
bool special_contains(const SpecialDesc& S, const std::vector<YPoint>& tuple, long level);

struct ScanConfig {
  long n = 1;
  long delta_max = 100;
  long isog_bound = 16;
  long coeff_cap = 10000;
  Prec prec = 192;
  int samples = 4;
  long depth = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  unsigned long seed = 1;
  void validate() const;
};

struct FamilyResult {
  CosetDesc coset;
  std::vector<TorsionTag> tags;  // per lattice row, constant over the samples
  std::vector<size_t> branch;    // V-image choice per coordinate
  int samples = 0;
};

/// Samples the free coordinates of S, intersects the relation lattices of
/// the V-images and returns the stable coset when it is proper.
std::optional<FamilyResult> family_dependence_test(const CorrespondenceSpec& cs, const SpecialDesc& S,
                                                   const ScanConfig& cfg);

struct Witness {
  std::string kind;  // "equal", "link", "fricke", "torsion"
  size_t i = 0, j = 0;
  long value = 0;    // isogeny degree, or |disc| of a torsion coordinate
  std::string to_string() const;
};

struct GraphRecord {
  SpecialDesc S;
  int M = 1;
  std::vector<YPoint> tuple;  // the scanned tuple (a witnessing member for families)
  std::vector<size_t> branch;
  IntMatrix relations;
  std::vector<TorsionTag> tags;
  CosetDesc B;
  long dim_W = 0;
  bool family = false;
  bool dependent = false;
  bool exemplary = true;
  long dominated_by = -1;  // index of the dominating record
  std::vector<Witness> witnesses;
  bool anomalous = false;
  long complexity = 0;
  std::string completeness;
  std::string key() const;
};

long defect(const GraphRecord& gr);

/// Record A is dominated by F when S_F is strictly larger, contains A's
/// tuple, and F's coset lies in A's (lattice containment with matching
/// torsion values).
bool dominates(const GraphRecord& F, const GraphRecord& A, long level);

/// Marks dominated records (exemplary = false, dominated_by set) and returns
/// the survivors.
std::vector<GraphRecord> exemplary_filter(std::vector<GraphRecord>& records, long level);

struct CensusReport {
  std::string kind;
  std::string curve;
  long level = 0;
  int M = 1;
  ScanConfig config;
  long points = 0;
  long tuples = 0;
  long independent = 0;
  std::string independent_label;
  std::vector<GraphRecord> records;  // dependent tuples, then families
  std::vector<std::string> torsion_images;
  std::vector<std::string> indeterminate;
  std::optional<long> d_star;
  std::optional<long> n_star;
  long anomalous = 0;
};

/// Heegner points of X_0(N) with |disc| <= delta_max (both square roots beta
/// of the discriminant mod 4N, one point per class).
std::vector<YPoint> heegner_points_up_to(long N, long delta_max, Prec prec);

/// h(u) for u in U and h over the cyclic isogeny matrices of degree <= max(1, depth).
std::vector<YPoint> hecke_orbit_points(const std::vector<PrecComplex>& U, long depth, Prec prec);

/// Links by construction between orbit points of the same base point.
SpecialDesc special_closure_U(const std::vector<YPoint>& tuple);

CensusReport scan_tuples(const CorrespondenceSpec& cs, const ScanConfig& cfg);
CensusReport u_special_scan(const CorrespondenceSpec& cs, const std::vector<PrecComplex>& U,
                            const ScanConfig& cfg);

struct GammaMatch {
  YPoint s;
  Point point;
  IntVec coeffs;  // on the generators
  Point torsion;
};

struct GammaSigmaResult {
  std::vector<GammaMatch> matches;
  long sigma_size = 0;
  long resolved = 0;
  long unresolved = 0;
};

/// V-images of Heegner points (|disc| <= delta_max) lying in the group
/// generated by the generators and E(Q)_tors, coefficients in [-box, box].
GammaSigmaResult gamma_sigma_intersection(const CorrespondenceSpec& cs,
                                          const std::vector<Point>& generators, long box,
                                          const ScanConfig& cfg);

}  // namespace cmrel
