#pragma once

#include <string>
#include <vector>

#include "cmrel/elliptic/curve.hpp"

namespace cmrel {

enum class Reduction { kGood, kSplitMultiplicative, kNonsplitMultiplicative, kAdditive };

/// Output of Tate's algorithm at one prime.
struct LocalData {
  long p = 0;
  std::string kodaira;  // "I0", "I5", "II", "I2*", "IV*", ...
  int conductor_exponent = 0;
  int tamagawa = 1;
  int disc_valuation = 0;  // of the minimal discriminant
  Reduction reduction = Reduction::kGood;
};

struct MinimalModel {
  CurveQ curve;  // global minimal model, a1, a3 in {0,1}, a2 in {-1,0,1}
  Iso iso;       // from the input model to the minimal one
};

MinimalModel minimal_model(const CurveQ& E);

/// Tate's algorithm at every prime dividing the minimal discriminant.
std::vector<LocalData> local_data(const CurveQ& E);
LocalData local_data_at(const CurveQ& E, long p);

mpz_class conductor(const CurveQ& E);

/// Number of projective points of the minimal model mod p, singular point
/// included.
long count_points_mod_p(const CurveQ& E, long p);

/// p + 1 - #E(F_p) on the minimal model: the Frobenius trace for good p and
/// +1 / -1 / 0 for split / nonsplit / additive reduction.
long ap(const CurveQ& E, long p);

/// (p, a_p) for all primes p <= bound, sharing one minimal model.
std::vector<std::pair<long, long>> ap_up_to(const CurveQ& E, long bound);

}  // namespace cmrel
