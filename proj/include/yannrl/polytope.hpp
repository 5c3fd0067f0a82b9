#pragma once

#include <cstddef>

#include "yannrl/matrix.hpp"

namespace yannrl {

// Closed convex polyhedron { x : F x <= g } in half-space form. May be
// unbounded or empty; emptiness is detected by LP, not by construction.
struct Polytope {
  Matrix F;  // q x n
  Vec g;     // q

  Polytope() = default;
  Polytope(Matrix f, Vec gg) : F(std::move(f)), g(std::move(gg)) {
    require(F.rows() == g.size(), "Polytope: F rows must match g size");
  }

  std::size_t size() const { return g.size(); }  // number of rows
  std::size_t dim() const { return F.cols(); }

  // Membership with per-row slack tol * max(1, |g_i|).
  bool contains(const Vec& x, double tol = 1e-9) const;

  // Worst violation F_i x - g_i over rows (negative means strictly inside).
  double max_violation(const Vec& x) const;

  // Axis-aligned box lo <= x <= hi, rows ordered (x_0 <= hi_0, -x_0 <= -lo_0,
  // x_1 <= hi_1, ...).
  static Polytope box(const Vec& lo, const Vec& hi);

  // Row-wise concatenation of two systems over the same space.
  Polytope appended(const Polytope& other) const;

  // Scales every row so ||F_i||_2 = 1. Rows with zero normal are kept as-is.
  Polytope normalized() const;
};

}  // namespace yannrl
