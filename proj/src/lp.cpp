#include "yannrl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace yannrl {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Dense tableau for min c.z, A z = b, z >= 0 built from F x <= g with the
// free x split into x+ - x-. Rows with negative g are stored negated so the
// right-hand side is nonnegative; phase 1 gives those rows artificials.
struct Tableau {
  std::size_t n = 0;       // original free dimension
  std::size_t q = 0;       // constraint rows
  std::size_t ncols = 0;   // structural + slack columns (no artificials)
  std::size_t acols = 0;   // artificial columns
  std::vector<Vec> T;      // q rows, each ncols + acols + 1 wide (rhs last)
  Vec cost;                // ncols + acols + 1 wide; last entry = -objective
  std::vector<std::size_t> basis;
  std::vector<bool> row_active;
  std::vector<bool> flipped;
  int iterations = 0;

  std::size_t width() const { return ncols + acols + 1; }
  std::size_t rhs_col() const { return ncols + acols; }
};

void pivot(Tableau& tb, std::size_t r, std::size_t e) {
  Vec& pr = tb.T[r];
  const double pv = pr[e];
  for (double& v : pr) v /= pv;
  pr[e] = 1.0;
  for (std::size_t i = 0; i < tb.q; ++i) {
    if (i == r || !tb.row_active[i]) continue;
    Vec& ri = tb.T[i];
    const double f = ri[e];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < tb.width(); ++j) ri[j] -= f * pr[j];
    ri[e] = 0.0;
  }
  const double cf = tb.cost[e];
  if (cf != 0.0) {
    for (std::size_t j = 0; j < tb.width(); ++j) tb.cost[j] -= cf * pr[j];
    tb.cost[e] = 0.0;
  }
  tb.basis[r] = e;
}

// Bland's rule: entering = lowest-index negative reduced cost; leaving =
// min ratio, ties broken by lowest basic-variable index. Returns the status.
SolveStatus simplex_loop(Tableau& tb, std::size_t active_cols, const LpOptions& opts) {
  const double tol = opts.tols.lp_opt;
  while (true) {
    if (static_cast<std::size_t>(tb.iterations) > opts.max_iterations)
      throw NumericError("lp_solve: iteration cap exceeded");
    std::size_t enter = active_cols;
    for (std::size_t j = 0; j < active_cols; ++j) {
      if (tb.cost[j] < -tol) {
        enter = j;
        break;
      }
    }
    if (enter == active_cols) return SolveStatus::Optimal;
    std::size_t leave = tb.q;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tb.q; ++i) {
      if (!tb.row_active[i]) continue;
      const double a = tb.T[i][enter];
      if (a <= opts.tols.lp_feas) continue;
      const double rhs = std::max(tb.T[i][tb.rhs_col()], 0.0);
      const double ratio = rhs / a;
      if (ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 &&
           (leave == tb.q || tb.basis[i] < tb.basis[leave]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == tb.q) return SolveStatus::Unbounded;
    pivot(tb, leave, enter);
    ++tb.iterations;
  }
}

}  // namespace

LpSolution lp_solve(const Vec& c, const Polytope& P, const LpOptions& opts) {
  const std::size_t n = P.dim();
  const std::size_t q = P.size();
  require(c.size() == n, "lp_solve: objective dimension mismatch");

  Tableau tb;
  tb.n = n;
  tb.q = q;
  tb.ncols = 2 * n + q;
  tb.flipped.assign(q, false);
  std::vector<std::size_t> art_col(q, 0);
  for (std::size_t i = 0; i < q; ++i)
    if (P.g[i] < 0.0) tb.flipped[i] = true;
  for (std::size_t i = 0; i < q; ++i)
    if (tb.flipped[i]) art_col[i] = tb.ncols + tb.acols++;

  tb.T.assign(q, Vec(tb.width(), 0.0));
  tb.basis.assign(q, 0);
  tb.row_active.assign(q, true);
  for (std::size_t i = 0; i < q; ++i) {
    const double d = tb.flipped[i] ? -1.0 : 1.0;
    Vec& row = tb.T[i];
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = d * P.F(i, j);
      row[n + j] = -d * P.F(i, j);
    }
    row[2 * n + i] = d;
    row[tb.rhs_col()] = d * P.g[i];
    if (tb.flipped[i]) {
      row[art_col[i]] = 1.0;
      tb.basis[i] = art_col[i];
    } else {
      tb.basis[i] = 2 * n + i;
    }
  }

  LpSolution sol;
  sol.tol_used = opts.tols.lp_opt;

  // Phase 1: minimize the sum of artificials.
  if (tb.acols > 0) {
    tb.cost.assign(tb.width(), 0.0);
    for (std::size_t i = 0; i < q; ++i) {
      if (!tb.flipped[i]) continue;
      for (std::size_t j = 0; j < tb.width(); ++j) tb.cost[j] -= tb.T[i][j];
    }
    // Artificials are basic, so their reduced costs start at zero.
    for (std::size_t i = 0; i < q; ++i)
      if (tb.flipped[i]) tb.cost[art_col[i]] = 0.0;
    const SolveStatus st = simplex_loop(tb, tb.ncols + tb.acols, opts);
    (void)st;  // phase 1 is bounded below by zero
    const double art_sum = -tb.cost[tb.rhs_col()];
    if (art_sum > opts.tols.lp_feas * std::max<std::size_t>(1, q)) {
      sol.status = SolveStatus::Infeasible;
      sol.iterations = tb.iterations;
      return sol;
    }
    // Drive artificials out of the basis; a row that cannot pivot is a
    // redundant equality and is dropped.
    for (std::size_t i = 0; i < q; ++i) {
      if (!tb.row_active[i] || tb.basis[i] < tb.ncols) continue;
      std::size_t piv = tb.ncols;
      for (std::size_t j = 0; j < tb.ncols; ++j) {
        if (std::fabs(tb.T[i][j]) > opts.tols.lp_feas) {
          piv = j;
          break;
        }
      }
      if (piv == tb.ncols) {
        tb.row_active[i] = false;
      } else {
        pivot(tb, i, piv);
      }
    }
  }

  // Phase 2 with the real objective; artificial columns are disabled by
  // restricting the entering-column scan to the structural width.
  tb.cost.assign(tb.width(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    tb.cost[j] = c[j];
    tb.cost[n + j] = -c[j];
  }
  for (std::size_t i = 0; i < q; ++i) {
    if (!tb.row_active[i]) continue;
    const std::size_t b = tb.basis[i];
    const double cb = tb.cost[b];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < tb.width(); ++j) tb.cost[j] -= cb * tb.T[i][j];
    tb.cost[b] = 0.0;
  }
  const SolveStatus st = simplex_loop(tb, tb.ncols, opts);
  sol.iterations = tb.iterations;
  if (st == SolveStatus::Unbounded) {
    sol.status = SolveStatus::Unbounded;
    return sol;
  }

  sol.status = SolveStatus::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    if (!tb.row_active[i]) continue;
    const std::size_t b = tb.basis[i];
    const double v = tb.T[i][tb.rhs_col()];
    if (b < n)
      sol.x[b] += v;
    else if (b < 2 * n)
      sol.x[b - n] -= v;
  }
  sol.objective = dot(c, sol.x);
  sol.duals.assign(q, 0.0);
  for (std::size_t i = 0; i < q; ++i)
    sol.duals[i] = std::max(tb.cost[2 * n + i], 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    double v = -P.g[i];
    for (std::size_t j = 0; j < n; ++j) v += P.F(i, j) * sol.x[j];
    if (v >= -opts.tols.lp_feas * std::max(1.0, std::fabs(P.g[i])))
      sol.active_set.push_back(static_cast<int>(i));
  }

  if (opts.self_check) {
    Vec grad = c;
    for (std::size_t i = 0; i < q; ++i) {
      if (sol.duals[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) grad[j] += P.F(i, j) * sol.duals[i];
    }
    const double scale = std::max(1.0, norm_inf(c));
    if (norm_inf(grad) > 1e-8 * scale)
      throw NumericError("lp_solve: KKT stationarity self-check failed");
    if (P.max_violation(sol.x) > 1e-8 * std::max(1.0, norm_inf(P.g)))
      throw NumericError("lp_solve: KKT feasibility self-check failed");
  }
  return sol;
}

ChebyshevResult chebyshev_center(const Polytope& P, const LpOptions& opts) {
  const std::size_t n = P.dim();
  const std::size_t q = P.size();
  Matrix F(q, n + 1);
  Vec g = P.g;
  for (std::size_t i = 0; i < q; ++i) {
    double nrm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      F(i, j) = P.F(i, j);
      nrm += P.F(i, j) * P.F(i, j);
    }
    F(i, n) = std::sqrt(nrm);
  }
  Vec c(n + 1, 0.0);
  c[n] = -1.0;  // maximize the radius
  const LpSolution lp = lp_solve(c, Polytope(std::move(F), std::move(g)), opts);
  ChebyshevResult r;
  if (lp.status == SolveStatus::Unbounded) {
    r.status = SolveStatus::Unbounded;
    r.radius = HUGE_VAL;
    return r;
  }
  if (lp.status != SolveStatus::Optimal) {
    r.status = lp.status;
    return r;
  }
  r.status = SolveStatus::Optimal;
  r.center.assign(lp.x.begin(), lp.x.begin() + n);
  r.radius = lp.x[n];
  return r;
}

bool is_feasible(const Polytope& P, const LpOptions& opts) {
  if (P.size() == 0) return true;
  const ChebyshevResult c = chebyshev_center(P, opts);
  if (c.status == SolveStatus::Unbounded) return true;
  return c.status == SolveStatus::Optimal && c.radius >= -opts.tols.lp_feas;
}

ReduceResult remove_redundant(const Polytope& P, const LpOptions& opts) {
  ReduceResult out;
  const std::size_t n = P.dim();
  const std::size_t q = P.size();

  if (!is_feasible(P, opts)) {
    out.status = ReduceStatus::Infeasible;
    out.poly = P;
    return out;
  }

  // Drop trivially true rows and exact duplicates (scale invariant).
  const Polytope Pn = P.normalized();
  std::vector<int> kept;
  for (std::size_t i = 0; i < q; ++i) {
    double nrm = 0.0;
    for (std::size_t j = 0; j < n; ++j) nrm += P.F(i, j) * P.F(i, j);
    if (nrm == 0.0) {
      continue;  // feasibility already verified, so g_i >= 0 here
    }
    bool dup = false;
    for (int k : kept) {
      double d = std::fabs(Pn.g[k] - Pn.g[i]);
      for (std::size_t j = 0; j < n; ++j)
        d = std::max(d, std::fabs(Pn.F(k, j) - Pn.F(i, j)));
      if (d <= 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(static_cast<int>(i));
  }

  // LP test per row: maximize F_i x subject to the other kept rows plus the
  // row itself relaxed by one unit (keeps the LP bounded in that direction).
  // If the maximum cannot exceed g_i, the row is implied.
  for (std::size_t pos = 0; pos < kept.size();) {
    const int i = kept[pos];
    Matrix F(kept.size(), n);
    Vec g(kept.size());
    for (std::size_t t = 0; t < kept.size(); ++t) {
      const int k = kept[t];
      for (std::size_t j = 0; j < n; ++j) F(t, j) = P.F(k, j);
      g[t] = P.g[k] + (k == i ? 1.0 : 0.0);
    }
    Vec c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = -P.F(i, j);
    const LpSolution lp = lp_solve(c, Polytope(std::move(F), std::move(g)), opts);
    const double tol = 10.0 * opts.tols.lp_feas * std::max(1.0, std::fabs(P.g[i]));
    if (lp.status == SolveStatus::Optimal && -lp.objective <= P.g[i] + tol) {
      kept.erase(kept.begin() + pos);
    } else {
      ++pos;
    }
  }

  Matrix F(kept.size(), n);
  Vec g(kept.size());
  for (std::size_t t = 0; t < kept.size(); ++t) {
    for (std::size_t j = 0; j < n; ++j) F(t, j) = P.F(kept[t], j);
    g[t] = P.g[kept[t]];
  }
  out.poly = Polytope(std::move(F), std::move(g));
  out.kept = std::move(kept);
  return out;
}

}  // namespace yannrl
