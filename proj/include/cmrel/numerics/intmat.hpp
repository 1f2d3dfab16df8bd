#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cmrel {

using IntVec = std::vector<mpz_class>;

/// Dense matrix of arbitrary-size integers. When used as a lattice basis the
/// rows are the basis vectors.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(size_t rows, size_t cols);
  static IntMatrix identity(size_t n);
  static IntMatrix from_rows(const std::vector<IntVec>& rows, size_t cols);
  static IntMatrix from_longs(const std::vector<std::vector<long>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  mpz_class& at(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const mpz_class& at(size_t i, size_t j) const { return data_[i * cols_ + j]; }
  IntVec row(size_t i) const;
  void set_row(size_t i, const IntVec& v);
  void append_row(const IntVec& v);
  void swap_rows(size_t i, size_t j);

  IntMatrix transpose() const;
  IntMatrix operator*(const IntMatrix& o) const;
  bool operator==(const IntMatrix& o) const = default;

  std::string to_string() const;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<mpz_class> data_;
};

/// LLL reduction (delta = 0.99) in exact integer arithmetic.
/// Throws InvalidInput("degenerate basis") when the rows are dependent.
IntMatrix reduce_lattice(const IntMatrix& basis);

/// LLL that tolerates dependent rows; zero vectors are dropped.
IntMatrix reduce_generating_set(const IntMatrix& gens);

/// Row Hermite normal form: upper echelon, positive pivots, entries above
/// each pivot reduced into [0, pivot). Zero rows are removed.
IntMatrix hermite_form(const IntMatrix& m);

/// Basis of {x in Z^rows : x * m = 0}, in Hermite form.
IntMatrix left_kernel(const IntMatrix& m);

/// The saturation (Q-span intersected with Z^n) of the row lattice, in Hermite form.
IntMatrix saturate(const IntMatrix& m);

/// Intersection of two row lattices in Z^n, in Hermite form.
IntMatrix lattice_intersection(const IntMatrix& a, const IntMatrix& b);

/// Row lattice of a contained in the row lattice of b.
bool lattice_contains(const IntMatrix& b, const IntMatrix& a);

/// Solve x * m = v for integral x; returns false if no integral solution.
bool solve_integral(const IntMatrix& m, const IntVec& v, IntVec& x);

int matrix_rank(const IntMatrix& m);
mpz_class gram_determinant(const IntMatrix& m);
mpz_class squared_norm(const IntVec& v);
mpz_class max_abs(const IntVec& v);

}  // namespace cmrel
