#pragma once

#include <vector>

#include "yannrl/polytope.hpp"
#include "yannrl/tolerances.hpp"

namespace yannrl {

enum class SolveStatus { Optimal, Infeasible, Unbounded };

const char* to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  Vec x;
  double objective = 0.0;
  std::vector<int> active_set;  // rows binding at the optimum, ascending
  Vec duals;                    // multipliers for F x <= g, duals >= 0
  int iterations = 0;
  double tol_used = 0.0;
};

// Minimizes c.x over { x : F x <= g } with a dense two-phase simplex using
// Bland's rule (no cycling). Free variables are split into positive parts.
// When self_check is set, the KKT conditions of an Optimal return are
// verified to 1e-8 and a NumericError is thrown on failure.
struct LpOptions {
  Tolerances tols{};
  bool self_check = false;
  std::size_t max_iterations = 100000;
};

LpSolution lp_solve(const Vec& c, const Polytope& P, const LpOptions& opts = {});

struct ChebyshevResult {
  SolveStatus status = SolveStatus::Infeasible;
  Vec center;
  double radius = 0.0;  // +inf reported as HUGE_VAL when unbounded
};

// Largest inscribed ball. radius < 0 means the system is infeasible (the
// LP relaxation still solves); Unbounded means the polyhedron contains
// arbitrarily large balls.
ChebyshevResult chebyshev_center(const Polytope& P, const LpOptions& opts = {});

bool is_feasible(const Polytope& P, const LpOptions& opts = {});

enum class ReduceStatus { Ok, Infeasible };

struct ReduceResult {
  ReduceStatus status = ReduceStatus::Ok;
  Polytope poly;
  std::vector<int> kept;  // original row indices that remain
};

// Removes rows implied by the others (LP test per row) after dropping exact
// duplicates. Result is minimal: no remaining row is implied by the rest.
ReduceResult remove_redundant(const Polytope& P, const LpOptions& opts = {});

}  // namespace yannrl
