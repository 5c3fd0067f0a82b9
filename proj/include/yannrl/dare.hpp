#pragma once

#include "yannrl/matrix.hpp"
#include "yannrl/tolerances.hpp"

namespace yannrl {

struct DareResult {
  Matrix P;
  int iterations = 0;
  double residual = 0.0;  // ||P - (Q + A'PA - A'PB (R+B'PB)^-1 B'PA)||_inf
  double tol_used = 0.0;
};

// Solves P = Q + A'PA - A'PB (R + B'PB)^-1 B'PA by fixed-point iteration
// from P0 = Q, symmetrizing every iterate. Requires (A, B) stabilizable and
// R positive definite; throws NumericError if the iteration cap is reached
// or an inner solve loses definiteness.
DareResult solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q,
                      const Matrix& R, const Tolerances& tols = default_tols());

// One-step gain u = -(R + B'PB)^-1 B'PA x for the converged P.
Matrix lqr_gain(const Matrix& A, const Matrix& B, const Matrix& R, const Matrix& P);

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q,
                     const Matrix& R, const Matrix& P);

}  // namespace yannrl
