#include "yannrl/dare.hpp"

#include <cmath>

#include "yannrl/errors.hpp"

namespace yannrl {

namespace {

// Q + A'PA - A'PB (R+B'PB)^-1 B'PA.  Uses an LU solve instead of forming
// the inverse; the inner matrix is PD whenever P >= 0 and R > 0.
Matrix riccati_map(const Matrix& A, const Matrix& B, const Matrix& Q,
                   const Matrix& R, const Matrix& P) {
  Matrix PA = P * A;
  Matrix PB = P * B;
  Matrix AtPA = multiply_transposed(A, PA);
  Matrix BtPB = multiply_transposed(B, PB);
  Matrix BtPA = multiply_transposed(B, PA);
  Matrix inner = R + BtPB;
  Matrix gain = lu_solve(inner, BtPA);  // (R+B'PB)^-1 B'PA
  Matrix AtPB = multiply_transposed(A, PB);
  return Q + AtPA - AtPB * gain;
}

}  // namespace

DareResult solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q,
                      const Matrix& R, const Tolerances& tols) {
  const std::size_t n = A.rows();
  require(A.cols() == n, "solve_dare: A must be square");
  require(B.rows() == n, "solve_dare: B row count must match A");
  require(Q.rows() == n && Q.cols() == n, "solve_dare: Q must be n x n");
  require(R.rows() == B.cols() && R.cols() == B.cols(),
          "solve_dare: R must be m x m");

  Matrix P = symmetrized(Q);
  DareResult out;
  out.tol_used = tols.dare;
  for (std::size_t it = 1; it <= tols.dare_max_iter; ++it) {
    Matrix next = symmetrized(riccati_map(A, B, Q, R, P));
    double diff = max_abs_diff(next, P);
    require(next.all_finite(), "solve_dare: iteration diverged");
    P = next;
    if (diff <= tols.dare) {
      // The successive difference is exactly the fixed-point residual of the
      // previous iterate; one more application tightens it further, so the
      // returned P satisfies residual <= diff.
      out.P = P;
      out.iterations = static_cast<int>(it);
      out.residual = dare_residual(A, B, Q, R, P);
      return out;
    }
  }
  throw NumericError("solve_dare: no convergence within iteration cap");
}

Matrix lqr_gain(const Matrix& A, const Matrix& B, const Matrix& R, const Matrix& P) {
  Matrix PA = P * A;
  Matrix PB = P * B;
  Matrix inner = R + multiply_transposed(B, PB);
  Matrix BtPA = multiply_transposed(B, PA);
  Matrix K = lu_solve(inner, BtPA);
  return K * -1.0;  // u = K x with K = -(R+B'PB)^-1 B'PA
}

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& P) {
  Matrix mapped = riccati_map(A, B, Q, R, P);
  return max_abs_diff(mapped, P);
}

}  // namespace yannrl
