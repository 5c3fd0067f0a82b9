#pragma once

#include <vector>

#include "yannrl/lp.hpp"
#include "yannrl/matrix.hpp"
#include "yannrl/polytope.hpp"
#include "yannrl/tolerances.hpp"

namespace yannrl {

struct QpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  double objective = 0.0;       // 0.5 x'Hx + f.x at the minimizer
  std::vector<int> active_set;  // working set at the optimum, ascending
  Vec duals;                    // length q, >= 0, zero off the working set
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct QpOptions {
  Tolerances tols{};
  int max_iterations = 10000;
  // When nonempty, an equality solve on this working set is tried first and
  // accepted if it is primal and dual feasible. Used by the parametric
  // enumerator, which usually knows the active set in advance.
  std::vector<int> warm_active;
  bool self_check = true;  // throw NumericError if KKT residual > tols.qp_kkt
};

// Minimizes 0.5 x'Hx + f.x over { x : F x <= g } with a primal active-set
// method (equality subproblems via a Schur complement on the Cholesky
// factor of H). H must be symmetric positive definite, so the problem is
// never unbounded; Infeasible means the polyhedron is empty.
QpSolution qp_solve(const Matrix& H, const Vec& f, const Polytope& P,
                    const QpOptions& opts = {});

}  // namespace yannrl
