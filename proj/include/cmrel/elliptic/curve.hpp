#pragma once

#include <gmpxx.h>

#include <array>
#include <string>

namespace cmrel {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over the rationals.
class CurveQ {
 public:
  CurveQ(mpq_class a1, mpq_class a2, mpq_class a3, mpq_class a4, mpq_class a6);
  static CurveQ from_longs(long a1, long a2, long a3, long a4, long a6);
  /// "a1,a2,a3,a4,a6" with integer or p/q entries; brackets are optional.
  static CurveQ parse(const std::string& s);

  const mpq_class& a1() const { return a_[0]; }
  const mpq_class& a2() const { return a_[1]; }
  const mpq_class& a3() const { return a_[2]; }
  const mpq_class& a4() const { return a_[3]; }
  const mpq_class& a6() const { return a_[4]; }
  const std::array<mpq_class, 5>& ainvs() const { return a_; }

  const mpq_class& b2() const { return b2_; }
  const mpq_class& b4() const { return b4_; }
  const mpq_class& b6() const { return b6_; }
  const mpq_class& b8() const { return b8_; }
  const mpq_class& c4() const { return c4_; }
  const mpq_class& c6() const { return c6_; }
  const mpq_class& disc() const { return disc_; }
  const mpq_class& j() const { return j_; }

  bool is_integral() const;
  bool operator==(const CurveQ& o) const { return a_ == o.a_; }
  std::string to_string() const;  // "[a1,a2,a3,a4,a6]"

 private:
  std::array<mpq_class, 5> a_;
  mpq_class b2_, b4_, b6_, b8_, c4_, c6_, disc_, j_;
};

struct Point {
  bool inf = true;
  mpq_class x, y;

  static Point infinity() { return {}; }
  static Point affine(mpq_class x, mpq_class y) { return {false, std::move(x), std::move(y)}; }
  bool operator==(const Point& o) const {
    return inf == o.inf && (inf || (x == o.x && y == o.y));
  }
  std::string to_string() const;  // "(x,y)" or "O"
};

bool on_curve(const CurveQ& E, const Point& P);

/// Group law; every operation throws InvalidInput("point not on curve") for
/// inputs off the curve.
Point point_neg(const CurveQ& E, const Point& P);
Point point_add(const CurveQ& E, const Point& P, const Point& Q);
Point point_sub(const CurveQ& E, const Point& P, const Point& Q);
Point point_mul(const CurveQ& E, const Point& P, const mpz_class& k);

/// Change of coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
struct Iso {
  mpq_class u = 1, r = 0, s = 0, t = 0;

  CurveQ apply(const CurveQ& E) const;       // the model in (x', y')
  Point map_point(const Point& P) const;     // (x, y) -> (x', y')
  Point unmap_point(const Point& P) const;   // (x', y') -> (x, y)
  Iso then(const Iso& next) const;           // first this, then next
};

}  // namespace cmrel
