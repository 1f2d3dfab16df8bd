#include "cmrel/numerics/intmat.hpp"

#include <sstream>
#include <utility>

#include "cmrel/error.hpp"

namespace cmrel {

IntMatrix::IntMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix IntMatrix::identity(size_t n) {
  IntMatrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVec>& rows, size_t cols) {
  IntMatrix m(0, cols);
  for (const auto& r : rows) m.append_row(r);
  return m;
}

IntMatrix IntMatrix::from_longs(const std::vector<std::vector<long>>& rows) {
  size_t cols = rows.empty() ? 0 : rows.front().size();
  IntMatrix m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InvalidInput("ragged matrix");
    for (size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

IntVec IntMatrix::row(size_t i) const {
  return IntVec(data_.begin() + static_cast<long>(i * cols_),
                data_.begin() + static_cast<long>((i + 1) * cols_));
}

void IntMatrix::set_row(size_t i, const IntVec& v) {
  for (size_t j = 0; j < cols_; ++j) at(i, j) = v[j];
}

void IntMatrix::append_row(const IntVec& v) {
  if (v.size() != cols_) throw InvalidInput("row length mismatch");
  data_.insert(data_.end(), v.begin(), v.end());
  ++rows_;
}

void IntMatrix::swap_rows(size_t i, size_t j) {
  if (i == j) return;
  for (size_t k = 0; k < cols_; ++k) std::swap(at(i, k), at(j, k));
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw InvalidInput("dimension mismatch");
  IntMatrix r(rows_, o.cols_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t k = 0; k < cols_; ++k) {
      if (at(i, k) == 0) continue;
      for (size_t j = 0; j < o.cols_; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
    }
  return r;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << at(i, j).get_str();
    os << "]";
  }
  os << "]";
  return os.str();
}

mpz_class squared_norm(const IntVec& v) {
  mpz_class s = 0;
  for (const auto& x : v) s += x * x;
  return s;
}

mpz_class max_abs(const IntVec& v) {
  mpz_class m = 0;
  for (const auto& x : v) {
    mpz_class a = abs(x);
    if (a > m) m = a;
  }
  return m;
}

namespace {

mpz_class dot(const IntMatrix& m, size_t i, size_t j) {
  mpz_class s = 0;
  for (size_t k = 0; k < m.cols(); ++k) s += m.at(i, k) * m.at(j, k);
  return s;
}

// round(a / b) for b > 0
mpz_class round_div(const mpz_class& a, const mpz_class& b) {
  mpz_class num = 2 * a + b;
  mpz_class den = 2 * b;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

// Integral LLL after Cohen, Algorithm 2.6.7, with delta = 99/100.
// Indices are 0-based; d[i + 1] holds Cohen's d_i and d[0] = 1.
void lll_in_place(IntMatrix& b) {
  const size_t n = b.rows();
  if (n <= 1) {
    if (n == 1 && squared_norm(b.row(0)) == 0) throw InvalidInput("degenerate basis");
    return;
  }
  std::vector<std::vector<mpz_class>> lam(n, std::vector<mpz_class>(n));
  std::vector<mpz_class> d(n + 1);
  d[0] = 1;
  d[1] = dot(b, 0, 0);
  if (d[1] == 0) throw InvalidInput("degenerate basis");

  auto red = [&](size_t k, size_t l) {
    mpz_class twice = 2 * abs(lam[k][l]);
    if (twice <= d[l + 1]) return;
    mpz_class q = round_div(lam[k][l], d[l + 1]);
    for (size_t c = 0; c < b.cols(); ++c) b.at(k, c) -= q * b.at(l, c);
    lam[k][l] -= q * d[l + 1];
    for (size_t i = 0; i < l; ++i) lam[k][i] -= q * lam[l][i];
  };

  size_t k = 1;
  size_t kmax = 0;
  while (k < n) {
    if (k > kmax) {
      kmax = k;
      for (size_t j = 0; j <= k; ++j) {
        mpz_class u = dot(b, k, j);
        for (size_t i = 0; i < j; ++i) {
          u = (d[i + 1] * u - lam[k][i] * lam[j][i]);
          mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[i].get_mpz_t());
        }
        if (j < k) {
          lam[k][j] = u;
        } else {
          d[k + 1] = u;
          if (u == 0) throw InvalidInput("degenerate basis");
        }
      }
    }
    red(k, k - 1);
    mpz_class lhs = 100 * (d[k + 1] * d[k - 1] + lam[k][k - 1] * lam[k][k - 1]);
    mpz_class rhs = 99 * d[k] * d[k];
    if (lhs < rhs) {
      b.swap_rows(k, k - 1);
      for (size_t j = 0; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
      mpz_class l = lam[k][k - 1];
      mpz_class bb = d[k - 1] * d[k + 1] + l * l;
      mpz_divexact(bb.get_mpz_t(), bb.get_mpz_t(), d[k].get_mpz_t());
      for (size_t i = k + 1; i <= kmax; ++i) {
        mpz_class t = lam[i][k];
        mpz_class nk = d[k + 1] * lam[i][k - 1] - l * t;
        mpz_divexact(nk.get_mpz_t(), nk.get_mpz_t(), d[k].get_mpz_t());
        lam[i][k] = nk;
        mpz_class nk1 = bb * t + l * lam[i][k];
        mpz_divexact(nk1.get_mpz_t(), nk1.get_mpz_t(), d[k + 1].get_mpz_t());
        lam[i][k - 1] = nk1;
      }
      d[k] = bb;
      if (k > 1) --k;
    } else {
      for (size_t l = k - 1; l-- > 0;) red(k, l);
      ++k;
    }
  }
}

// Echelon form with a unimodular history; used by kernel computations.
void echelon(IntMatrix& m, size_t ncols_to_reduce) {
  size_t r = 0;
  for (size_t c = 0; c < ncols_to_reduce && r < m.rows(); ++c) {
    while (true) {
      size_t best = m.rows();
      for (size_t i = r; i < m.rows(); ++i) {
        if (m.at(i, c) == 0) continue;
        if (best == m.rows() || abs(m.at(i, c)) < abs(m.at(best, c))) best = i;
      }
      if (best == m.rows()) break;
      m.swap_rows(r, best);
      bool done = true;
      for (size_t i = r + 1; i < m.rows(); ++i) {
        if (m.at(i, c) == 0) continue;
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), m.at(i, c).get_mpz_t(), m.at(r, c).get_mpz_t());
        for (size_t j = c; j < m.cols(); ++j) m.at(i, j) -= q * m.at(r, j);
        if (m.at(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (m.at(r, c) == 0) continue;
    if (m.at(r, c) < 0)
      for (size_t j = c; j < m.cols(); ++j) m.at(r, j) = -m.at(r, j);
    for (size_t i = 0; i < r; ++i) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), m.at(i, c).get_mpz_t(), m.at(r, c).get_mpz_t());
      if (q != 0)
        for (size_t j = c; j < m.cols(); ++j) m.at(i, j) -= q * m.at(r, j);
    }
    ++r;
  }
}

bool is_zero_row(const IntMatrix& m, size_t i, size_t from, size_t to) {
  for (size_t j = from; j < to; ++j)
    if (m.at(i, j) != 0) return false;
  return true;
}

}  // namespace

IntMatrix reduce_lattice(const IntMatrix& basis) {
  if (basis.rows() == 0 || basis.cols() == 0) throw InvalidInput("degenerate basis");
  IntMatrix b = basis;
  lll_in_place(b);
  return b;
}

IntMatrix reduce_generating_set(const IntMatrix& gens) {
  IntMatrix h = hermite_form(gens);
  if (h.rows() == 0) return h;
  lll_in_place(h);
  return h;
}

IntMatrix hermite_form(const IntMatrix& m) {
  IntMatrix w = m;
  echelon(w, w.cols());
  IntMatrix out(0, m.cols());
  for (size_t i = 0; i < w.rows(); ++i)
    if (!is_zero_row(w, i, 0, w.cols())) out.append_row(w.row(i));
  return out;
}

IntMatrix left_kernel(const IntMatrix& m) {
  const size_t r = m.rows(), c = m.cols();
  IntMatrix aug(r, c + r);
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = 0; j < c; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, c + i) = 1;
  }
  echelon(aug, c);
  IntMatrix ker(0, r);
  for (size_t i = 0; i < r; ++i) {
    if (!is_zero_row(aug, i, 0, c)) continue;
    IntVec v(r);
    for (size_t j = 0; j < r; ++j) v[j] = aug.at(i, c + j);
    ker.append_row(v);
  }
  return hermite_form(ker);
}

IntMatrix saturate(const IntMatrix& m) {
  const size_t n = m.cols();
  if (m.rows() == 0) return IntMatrix(0, n);
  IntMatrix orth = left_kernel(m.transpose());  // vectors y with m y = 0
  if (orth.rows() == 0) return IntMatrix::identity(n);
  return left_kernel(orth.transpose());
}

IntMatrix lattice_intersection(const IntMatrix& a, const IntMatrix& b) {
  const size_t n = a.cols();
  if (a.rows() == 0 || b.rows() == 0) return IntMatrix(0, n);
  IntMatrix stacked(0, n);
  for (size_t i = 0; i < a.rows(); ++i) stacked.append_row(a.row(i));
  for (size_t i = 0; i < b.rows(); ++i) {
    IntVec v = b.row(i);
    for (auto& x : v) x = -x;
    stacked.append_row(v);
  }
  IntMatrix ker = left_kernel(stacked);
  IntMatrix out(0, n);
  for (size_t k = 0; k < ker.rows(); ++k) {
    IntVec v(n);
    for (size_t i = 0; i < a.rows(); ++i)
      for (size_t j = 0; j < n; ++j) v[j] += ker.at(k, i) * a.at(i, j);
    out.append_row(v);
  }
  return hermite_form(out);
}

bool lattice_contains(const IntMatrix& b, const IntMatrix& a) {
  if (a.rows() == 0) return true;
  IntMatrix both = b;
  for (size_t i = 0; i < a.rows(); ++i) both.append_row(a.row(i));
  return hermite_form(both) == hermite_form(b);
}

bool solve_integral(const IntMatrix& m, const IntVec& v, IntVec& x) {
  IntMatrix st(0, m.cols());
  IntVec neg = v;
  for (auto& e : neg) e = -e;
  st.append_row(neg);
  for (size_t i = 0; i < m.rows(); ++i) st.append_row(m.row(i));
  IntMatrix ker = left_kernel(st);
  if (ker.rows() == 0 || ker.at(0, 0) != 1) return false;
  x.assign(m.rows(), 0);
  for (size_t i = 0; i < m.rows(); ++i) x[i] = ker.at(0, i + 1);
  return true;
}

int matrix_rank(const IntMatrix& m) { return static_cast<int>(hermite_form(m).rows()); }

mpz_class gram_determinant(const IntMatrix& m) {
  const size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix g = m * m.transpose();
  // Bareiss fraction-free elimination
  mpz_class prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (g.at(k, k) == 0) {
      size_t p = k + 1;
      while (p < n && g.at(p, k) == 0) ++p;
      if (p == n) return 0;
      g.swap_rows(k, p);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        mpz_class t = g.at(i, j) * g.at(k, k) - g.at(i, k) * g.at(k, j);
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        g.at(i, j) = t;
      }
      g.at(i, k) = 0;
    }
    prev = g.at(k, k);
  }
  return sign * g.at(n - 1, n - 1);
}

}  // namespace cmrel
