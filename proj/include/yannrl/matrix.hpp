#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "yannrl/errors.hpp"

namespace yannrl {

using Vec = std::vector<double>;

// Dense row-major matrix of 64-bit floats. Sizes in this project are small
// (tens of rows); all storage is contiguous and reproducible.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diag(const Vec& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  double* row(std::size_t i) { return a_.data() + i * cols_; }
  const double* row(std::size_t i) const { return a_.data() + i * cols_; }

  Matrix transposed() const;
  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;
  Vec operator*(const Vec& x) const;
  Matrix operator*(double s) const;
  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  // Copies `src` into this matrix with its (0,0) at (r0, c0).
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src);
  Matrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
  Vec extract_row(std::size_t i) const;

  bool all_finite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec a_;
};

inline Matrix operator*(double s, const Matrix& m) { return m * s; }

// y = A^T x
Vec multiply_transposed(const Matrix& A, const Vec& x);
// A^T B without forming the transpose
Matrix multiply_transposed(const Matrix& A, const Matrix& B);

Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);

double dot(const Vec& a, const Vec& b);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
double norm_inf(const Matrix& m);  // max row sum
double max_abs(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vec& a, const Vec& b);

// Solves A x = b by LU with partial pivoting. Throws NumericError when a
// pivot falls below 1e-13 * max|A|.
Vec lu_solve(const Matrix& A, const Vec& b);
Matrix lu_solve(const Matrix& A, const Matrix& B);
Matrix inverse(const Matrix& A);

// Lower Cholesky factor of a symmetric positive definite matrix. Throws
// NumericError when positive definiteness fails.
Matrix cholesky(const Matrix& A);
Vec chol_solve(const Matrix& L, const Vec& b);
Matrix chol_solve(const Matrix& L, const Matrix& B);

Matrix symmetrized(const Matrix& A);

// Spectral radius estimate via the Gelfand formula, ||A^(2^k)||_inf^(1/2^k)
// with k repeated squarings. Accurate enough to separate rho < 1 from >= 1
// for the closed-loop checks used in tests.
double spectral_radius_estimate(const Matrix& A, int squarings = 10);

}  // namespace yannrl
