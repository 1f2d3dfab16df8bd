#pragma once

#include <memory>
#include <vector>

#include "cmrel/elliptic/curve.hpp"

namespace cmrel {

/// Coefficients a_1..a_T of the weight-two newform attached to a curve.
struct Newform {
  long N = 0;
  CurveQ curve;           // global minimal model
  std::vector<long> a;    // a[0] unused, a[n] for 1 <= n <= T

  long T() const { return static_cast<long>(a.size()) - 1; }
  long an(long n) const;  // throws InvalidInput past the cached range
};

/// a_n for n <= T from the traces a_p and the Hecke recursion. Results are
/// cached per curve (in memory and in the persistent cache); a cached form
/// with more coefficients may be returned.
std::shared_ptr<const Newform> an_coefficients(const CurveQ& E, long T);

}  // namespace cmrel
