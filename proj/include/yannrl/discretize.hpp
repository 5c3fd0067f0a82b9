#pragma once

#include <utility>

#include "yannrl/matrix.hpp"
#include "yannrl/tolerances.hpp"

namespace yannrl {

// Matrix exponential by scaling-and-squaring over a Taylor series. The input
// is scaled until its norm is below 1/8, summed to machine precision, then
// re-squared, which is accurate well past 1e-10 for the matrices used here.
Matrix expm(const Matrix& M);

struct DiscreteSystem {
  Matrix A;
  Matrix B;
};

// Exact zero-order-hold discretization of dx/dt = Ac x + Bc u at step dt:
// exp([[Ac, Bc], [0, 0]] dt) carries [A, B; 0, I] in its top rows.
DiscreteSystem zoh_discretize(const Matrix& Ac, const Matrix& Bc, double dt);

}  // namespace yannrl
