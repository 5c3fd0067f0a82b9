#include "yannrl/qp.hpp"

#include <algorithm>
#include <cmath>

namespace yannrl {

namespace {

struct Eqp {
  Vec x;
  Vec lambda;      // one multiplier per working-set row, in set order
  bool ok = true;  // false when the working-set rows are dependent
};

// min 0.5 x'Hx + f.x subject to F_W x = g_W, solved through the Schur
// complement on H = LL':
//   (F_W H^-1 F_W') lam = -(g_W + F_W H^-1 f),  x = -H^-1 (f + F_W' lam).
Eqp solve_eqp(const Matrix& L, const Vec& f, const Polytope& P,
              const std::vector<int>& W) {
  const std::size_t n = f.size();
  Eqp out;
  const Vec hinv_f = chol_solve(L, f);
  if (W.empty()) {
    out.x = -1.0 * hinv_f;
    return out;
  }
  const std::size_t m = W.size();
  Matrix Ft(n, m);  // F_W'
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < n; ++j) Ft(j, k) = P.F(W[k], j);
  const Matrix Y = chol_solve(L, Ft);
  const Matrix S = multiply_transposed(Ft, Y);  // F_W H^-1 F_W'
  Vec rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    double v = P.g[W[k]];
    for (std::size_t j = 0; j < n; ++j) v += P.F(W[k], j) * hinv_f[j];
    rhs[k] = -v;
  }
  Matrix Ls;
  try {
    Ls = cholesky(symmetrized(S));
  } catch (const NumericError&) {
    out.ok = false;
    return out;
  }
  out.lambda = chol_solve(Ls, rhs);
  Vec t = f;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < m; ++k) t[j] += Ft(j, k) * out.lambda[k];
  out.x = -1.0 * chol_solve(L, t);
  return out;
}

QpSolution build_solution(const Matrix& Hs, const Vec& f, const Polytope& P,
                          Vec x, const std::vector<int>& W, const Vec& lam_w,
                          int iterations) {
  const std::size_t n = f.size();
  const std::size_t q = P.size();
  QpSolution sol;
  sol.status = SolveStatus::Optimal;
  sol.x = std::move(x);
  sol.iterations = iterations;
  sol.duals.assign(q, 0.0);
  for (std::size_t k = 0; k < W.size(); ++k)
    sol.duals[W[k]] = std::max(lam_w[k], 0.0);
  sol.active_set = W;

  const Vec Hx = Hs * sol.x;
  sol.objective = 0.5 * dot(sol.x, Hx) + dot(f, sol.x);

  Vec grad = Hx + f;
  for (std::size_t i = 0; i < q; ++i) {
    if (sol.duals[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) grad[j] += P.F(i, j) * sol.duals[i];
  }
  const double stat_scale = std::max(1.0, norm_inf(f) + norm_inf(Hx));
  double res = norm_inf(grad) / stat_scale;
  for (std::size_t i = 0; i < q; ++i) {
    double v = -P.g[i];
    for (std::size_t j = 0; j < n; ++j) v += P.F(i, j) * sol.x[j];
    const double sc = std::max(1.0, std::fabs(P.g[i]));
    res = std::max(res, v / sc);                            // primal
    res = std::max(res, std::fabs(sol.duals[i] * v) / sc);  // complementarity
  }
  sol.kkt_residual = res;
  return sol;
}

}  // namespace

QpSolution qp_solve(const Matrix& H, const Vec& f, const Polytope& P,
                    const QpOptions& opts) {
  const std::size_t n = f.size();
  require(H.rows() == n && H.cols() == n, "qp_solve: H must match f");
  require(P.size() == 0 || P.dim() == n, "qp_solve: constraint width mismatch");

  const Matrix Hs = symmetrized(H);
  const Matrix L = cholesky(Hs);
  const std::size_t q = P.size();
  const double gscale = q == 0 ? 1.0 : std::max(1.0, norm_inf(P.g));
  const LpOptions lp_opts{opts.tols, false, 100000};

  if (q == 0) {
    const Eqp e = solve_eqp(L, f, P, {});
    return build_solution(Hs, f, P, e.x, {}, {}, 1);
  }

  if (!opts.warm_active.empty()) {
    std::vector<int> W = opts.warm_active;
    std::sort(W.begin(), W.end());
    W.erase(std::unique(W.begin(), W.end()), W.end());
    const bool in_range =
        W.front() >= 0 && static_cast<std::size_t>(W.back()) < q;
    if (in_range && W.size() <= n) {
      const Eqp e = solve_eqp(L, f, P, W);
      if (e.ok) {
        double lmin = 0.0;
        for (double l : e.lambda) lmin = std::min(lmin, l);
        if (lmin >= -opts.tols.dual_strict &&
            P.max_violation(e.x) <= opts.tols.lp_feas * gscale) {
          QpSolution sol = build_solution(Hs, f, P, e.x, W, e.lambda, 1);
          if (sol.kkt_residual <= opts.tols.qp_kkt) return sol;
          // fall through to the cold path on a bad guess
        }
      }
    }
  }

  // Feasible start: Chebyshev center, or any vertex when the polyhedron
  // holds arbitrarily large balls.
  Vec x;
  {
    const ChebyshevResult cc = chebyshev_center(P, lp_opts);
    if (cc.status == SolveStatus::Optimal && cc.radius >= -opts.tols.lp_feas) {
      x = cc.center;
    } else if (cc.status == SolveStatus::Unbounded) {
      const LpSolution lp = lp_solve(Vec(n, 0.0), P, lp_opts);
      if (lp.status != SolveStatus::Optimal) {
        QpSolution sol;
        sol.status = SolveStatus::Infeasible;
        return sol;
      }
      x = lp.x;
    } else {
      QpSolution sol;
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }

  std::vector<int> W;  // ascending
  int iterations = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    ++iterations;
    const Eqp e = solve_eqp(L, f, P, W);
    if (!e.ok) throw NumericError("qp_solve: working set became singular");
    const Vec p = e.x - x;
    if (norm_inf(p) <= 1e-11 * std::max(1.0, norm_inf(x))) {
      // At the working-set minimizer; drop the most negative multiplier,
      // smallest row index on ties.
      int drop = -1;
      double lmin = -opts.tols.dual_strict;
      for (std::size_t k = 0; k < W.size(); ++k) {
        if (e.lambda[k] < lmin) {
          lmin = e.lambda[k];
          drop = static_cast<int>(k);
        }
      }
      if (drop < 0) {
        QpSolution sol = build_solution(Hs, f, P, e.x, W, e.lambda, iterations);
        if (opts.self_check && sol.kkt_residual > opts.tols.qp_kkt)
          throw NumericError("qp_solve: KKT self-check failed");
        return sol;
      }
      W.erase(W.begin() + drop);
      continue;
    }
    // Step toward the subproblem minimizer, stopping at the first blocking
    // row; first (lowest-index) row wins ratio ties.
    double alpha = 1.0;
    int block = -1;
    const double dtol = 1e-12 * std::max(1.0, norm_inf(p));
    for (std::size_t i = 0; i < q; ++i) {
      if (std::binary_search(W.begin(), W.end(), static_cast<int>(i))) continue;
      double d = 0.0, r = P.g[i];
      for (std::size_t j = 0; j < n; ++j) {
        d += P.F(i, j) * p[j];
        r -= P.F(i, j) * x[j];
      }
      if (d <= dtol) continue;
      const double ratio = std::max(r, 0.0) / d;
      if (ratio < alpha - 1e-15) {
        alpha = ratio;
        block = static_cast<int>(i);
      }
    }
    if (block >= 0) {
      for (std::size_t j = 0; j < n; ++j) x[j] += alpha * p[j];
      W.insert(std::upper_bound(W.begin(), W.end(), block), block);
    } else {
      x = e.x;  // full step lands exactly on the subproblem minimizer
    }
  }
  throw NumericError("qp_solve: iteration cap exceeded");
}

}  // namespace yannrl
