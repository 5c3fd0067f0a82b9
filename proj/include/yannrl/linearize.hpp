#pragma once

#include <functional>

#include "yannrl/matrix.hpp"

namespace yannrl {

using VectorField = std::function<Vec(const Vec& x, const Vec& u)>;

struct Jacobians {
  Matrix A;  // df/dx at (x0, u0)
  Matrix B;  // df/du at (x0, u0)
};

// Central differences with per-coordinate steps rel_step * max(1, |z_j|).
Jacobians jacobian_linearize(const VectorField& f, const Vec& x0, const Vec& u0,
                             double rel_step = 1e-6);

}  // namespace yannrl
