#include "yannrl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "yannrl/kernels.hpp"

namespace yannrl {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    a_.insert(a_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(const Vec& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator+(const Matrix& o) const {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix+: shape mismatch");
  Matrix r = *this;
  kernels().axpy(1.0, o.a_.data(), r.a_.data(), r.a_.size());
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix-: shape mismatch");
  Matrix r = *this;
  kernels().axpy(-1.0, o.a_.data(), r.a_.data(), r.a_.size());
  return r;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix+=: shape mismatch");
  kernels().axpy(1.0, o.a_.data(), a_.data(), a_.size());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix-=: shape mismatch");
  kernels().axpy(-1.0, o.a_.data(), a_.data(), a_.size());
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  kernels().scal(s, a_.data(), a_.size());
  return *this;
}

Matrix Matrix::operator*(const Matrix& o) const {
  require(cols_ == o.rows_, "Matrix*: inner dimension mismatch");
  // C = A * B as accumulated rank-1-style row updates: C_i += A_ik * B_k.
  Matrix c(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    double* ci = c.row(i);
    const double* ai = row(i);
    for (std::size_t k = 0; k < cols_; ++k) {
      if (ai[k] != 0.0) kernels().axpy(ai[k], o.row(k), ci, o.cols_);
    }
  }
  return c;
}

Vec Matrix::operator*(const Vec& x) const {
  require(cols_ == x.size(), "Matrix*vec: dimension mismatch");
  Vec y(rows_);
  kernels().gemv(a_.data(), rows_, cols_, x.data(), y.data());
  return y;
}

Matrix Matrix::operator*(double s) const {
  Matrix r = *this;
  kernels().scal(s, r.a_.data(), r.a_.size());
  return r;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  require(r0 + src.rows_ <= rows_ && c0 + src.cols_ <= cols_,
          "set_block: out of range");
  for (std::size_t i = 0; i < src.rows_; ++i)
    std::memcpy(row(r0 + i) + c0, src.row(i), src.cols_ * sizeof(double));
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t rows,
                     std::size_t cols) const {
  require(r0 + rows <= rows_ && c0 + cols <= cols_, "block: out of range");
  Matrix b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    std::memcpy(b.row(i), row(r0 + i) + c0, cols * sizeof(double));
  return b;
}

Vec Matrix::extract_row(std::size_t i) const {
  require(i < rows_, "extract_row: out of range");
  return Vec(row(i), row(i) + cols_);
}

bool Matrix::all_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

Vec multiply_transposed(const Matrix& A, const Vec& x) {
  require(A.rows() == x.size(), "multiply_transposed: dimension mismatch");
  Vec y(A.cols());
  kernels().gemv_t(A.data(), A.rows(), A.cols(), x.data(), y.data());
  return y;
}

Matrix multiply_transposed(const Matrix& A, const Matrix& B) {
  require(A.rows() == B.rows(), "multiply_transposed: dimension mismatch");
  Matrix C(A.cols(), B.cols());
  // C += A_k outer B_k, row by row of the shared dimension.
  for (std::size_t k = 0; k < A.rows(); ++k)
    kernels().ger(C.data(), A.cols(), B.cols(), 1.0, A.row(k), B.row(k));
  return C;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.empty()) return bottom;
  if (bottom.empty()) return top;
  require(top.cols() == bottom.cols(), "vstack: column mismatch");
  Matrix r(top.rows() + bottom.rows(), top.cols());
  r.set_block(0, 0, top);
  r.set_block(top.rows(), 0, bottom);
  return r;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  if (left.empty()) return right;
  if (right.empty()) return left;
  require(left.rows() == right.rows(), "hstack: row mismatch");
  Matrix r(left.rows(), left.cols() + right.cols());
  r.set_block(0, 0, left);
  r.set_block(0, left.cols(), right);
  return r;
}

double dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dot: dimension mismatch");
  return kernels().dot(a.data(), b.data(), a.size());
}

Vec operator+(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "vec+: dimension mismatch");
  Vec r = a;
  kernels().axpy(1.0, b.data(), r.data(), r.size());
  return r;
}

Vec operator-(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "vec-: dimension mismatch");
  Vec r = a;
  kernels().axpy(-1.0, b.data(), r.data(), r.size());
  return r;
}

Vec operator*(double s, const Vec& a) {
  Vec r = a;
  kernels().scal(s, r.data(), r.size());
  return r;
}

double norm2(const Vec& a) { return std::sqrt(kernels().dot(a.data(), a.data(), a.size())); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

double norm_inf(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::fabs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      best = std::max(best, std::fabs(m(i, j)));
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "max_abs_diff: shape mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      best = std::max(best, std::fabs(a(i, j) - b(i, j)));
  return best;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "max_abs_diff: size mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::fabs(a[i] - b[i]));
  return best;
}

namespace {

// In-place LU with partial pivoting; perm holds the row order applied.
void lu_factor(Matrix& A, std::vector<std::size_t>& perm) {
  const std::size_t n = A.rows();
  require(A.cols() == n, "lu_factor: square matrix required");
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  const double tiny = 1e-13 * std::max(1.0, max_abs(A));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(A(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(A(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= tiny) throw NumericError("lu_factor: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(perm[k], perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = A(i, k) / A(k, k);
      A(i, k) = m;
      if (m != 0.0) kernels().axpy(-m, A.row(k) + k + 1, A.row(i) + k + 1, n - k - 1);
    }
  }
}

Vec lu_apply(const Matrix& LU, const std::vector<std::size_t>& perm, const Vec& b) {
  const std::size_t n = LU.rows();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    x[i] -= kernels().dot(LU.row(i), x.data(), i);
  for (std::size_t ii = n; ii-- > 0;) {
    x[ii] -= kernels().dot(LU.row(ii) + ii + 1, x.data() + ii + 1, n - ii - 1);
    x[ii] /= LU(ii, ii);
  }
  return x;
}

}  // namespace

Vec lu_solve(const Matrix& A, const Vec& b) {
  require(A.rows() == b.size(), "lu_solve: dimension mismatch");
  Matrix lu = A;
  std::vector<std::size_t> perm;
  lu_factor(lu, perm);
  return lu_apply(lu, perm, b);
}

Matrix lu_solve(const Matrix& A, const Matrix& B) {
  require(A.rows() == B.rows(), "lu_solve: dimension mismatch");
  Matrix lu = A;
  std::vector<std::size_t> perm;
  lu_factor(lu, perm);
  Matrix X(B.rows(), B.cols());
  Vec col(B.rows());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    for (std::size_t i = 0; i < B.rows(); ++i) col[i] = B(i, j);
    Vec x = lu_apply(lu, perm, col);
    for (std::size_t i = 0; i < B.rows(); ++i) X(i, j) = x[i];
  }
  return X;
}

Matrix inverse(const Matrix& A) { return lu_solve(A, Matrix::identity(A.rows())); }

Matrix cholesky(const Matrix& A) {
  const std::size_t n = A.rows();
  require(A.cols() == n, "cholesky: square matrix required");
  Matrix L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = A(i, j) - kernels().dot(L.row(i), L.row(j), j);
      if (i == j) {
        if (s <= 0.0) throw NumericError("cholesky: matrix not positive definite");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  return L;
}

Vec chol_solve(const Matrix& L, const Vec& b) {
  const std::size_t n = L.rows();
  require(b.size() == n, "chol_solve: dimension mismatch");
  Vec x = b;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] -= kernels().dot(L.row(i), x.data(), i);
    x[i] /= L(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= L(j, ii) * x[j];
    x[ii] /= L(ii, ii);
  }
  return x;
}

Matrix chol_solve(const Matrix& L, const Matrix& B) {
  Matrix X(B.rows(), B.cols());
  Vec col(B.rows());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    for (std::size_t i = 0; i < B.rows(); ++i) col[i] = B(i, j);
    Vec x = chol_solve(L, col);
    for (std::size_t i = 0; i < B.rows(); ++i) X(i, j) = x[i];
  }
  return X;
}

Matrix symmetrized(const Matrix& A) {
  Matrix s = A;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (A(i, j) + A(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

double spectral_radius_estimate(const Matrix& A, int squarings) {
  Matrix p = A;
  double scale_log = 0.0;
  for (int k = 0; k < squarings; ++k) {
    // Rescale between squarings so powers of stable/unstable matrices do not
    // under/overflow before the final norm is taken.
    const double nrm = norm_inf(p);
    if (nrm == 0.0) return 0.0;
    p *= 1.0 / nrm;
    scale_log = 2.0 * (scale_log + std::log(nrm));
    p = p * p;
  }
  const double total_log = std::log(std::max(norm_inf(p), 1e-300)) + scale_log;
  return std::exp(total_log / std::pow(2.0, squarings));
}

}  // namespace yannrl
