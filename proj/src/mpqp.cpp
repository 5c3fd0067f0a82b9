#include "yannrl/mpqp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "yannrl/lp.hpp"
#include "yannrl/rng.hpp"

namespace yannrl {

namespace {

std::string set_label(const std::vector<int>& a) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << "}";
  return os.str();
}

// Where a candidate region row came from; facet crossings use this to guess
// the neighbor's active set.
struct RowSource {
  enum Kind { Primal, Dual, Domain } kind = Domain;
  int index = 0;  // G row / position within the active set / domain row
};

// Center of the largest (d-1)-ball inside one facet: maximize r subject to
// F_j x + c_j r <= g_j for the other rows, with c_j the length of F_j
// projected into the facet plane, and the facet row held at equality.
std::optional<Vec> facet_center(const Polytope& dom, std::size_t facet,
                                const LpOptions& lp_opts) {
  const std::size_t n = dom.dim();
  const std::size_t q = dom.size();
  Vec nh(n);
  double nn = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    nh[j] = dom.F(facet, j);
    nn += nh[j] * nh[j];
  }
  nn = std::sqrt(nn);
  if (nn <= 0.0) return std::nullopt;
  for (auto& v : nh) v /= nn;

  Matrix F(q + 2, n + 1);
  Vec g(q + 2);
  for (std::size_t i = 0; i < q; ++i) {
    double along = 0.0;
    for (std::size_t j = 0; j < n; ++j) along += dom.F(i, j) * nh[j];
    double c2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = dom.F(i, j) - along * nh[j];
      c2 += t * t;
    }
    for (std::size_t j = 0; j < n; ++j) F(i, j) = dom.F(i, j);
    F(i, n) = i == facet ? 0.0 : std::sqrt(c2);
    g[i] = dom.g[i];
  }
  for (std::size_t j = 0; j < n; ++j) F(q, j) = -dom.F(facet, j);
  F(q, n) = 0.0;
  g[q] = -dom.g[facet];
  // cap the radius: on a zero-dimensional facet no row would bound it
  F(q + 1, n) = 1.0;
  g[q + 1] = 1e9;

  Vec c(n + 1, 0.0);
  c[n] = -1.0;
  const LpSolution lp = lp_solve(c, Polytope(std::move(F), std::move(g)), lp_opts);
  if (lp.status != SolveStatus::Optimal || lp.x[n] < -1e-9) return std::nullopt;
  return Vec(lp.x.begin(), lp.x.begin() + n);
}

struct Enumerator {
  const MpqpProblem& prob;
  const MpqpOptions& opts;
  std::size_t nu, np;
  Matrix H2, L, HiZ;  // 2H, its Cholesky factor, H2^{-1} Z
  Polytope theta;
  LpOptions lp_opts;
  MpqpSolution out;
  std::map<std::vector<int>, int> visited;  // region index, or -1 if skipped
  std::deque<std::pair<Vec, std::vector<int>>> work;

  Enumerator(const MpqpProblem& p, const MpqpOptions& o) : prob(p), opts(o) {
    nu = p.G.cols();
    np = p.domain.dim();
    lp_opts.tols = o.tols;
  }

  void enqueue_seeds() {
    const ChebyshevResult cc = chebyshev_center(theta, lp_opts);
    Vec center;
    if (cc.status == SolveStatus::Optimal && cc.radius > 0.0) {
      center = cc.center;
      work.push_back({center, {}});
    }

    // domain extreme points along the axes and random directions, pulled a
    // hair inward so they sit in some region's interior
    std::vector<Vec> dirs;
    for (std::size_t i = 0; i < np; ++i) {
      Vec d(np, 0.0);
      d[i] = 1.0;
      dirs.push_back(d);
      d[i] = -1.0;
      dirs.push_back(d);
    }
    Rng rng(opts.seed);
    for (std::size_t k = 0; k < 2 * np; ++k) {
      Vec d(np);
      for (auto& v : d) v = rng.normal();
      dirs.push_back(d);
    }
    Vec lo(np, 1.0), hi(np, -1.0);
    bool box_ok = true;
    for (std::size_t di = 0; di < dirs.size(); ++di) {
      const LpSolution lp = lp_solve(-1.0 * dirs[di], theta, lp_opts);
      if (lp.status != SolveStatus::Optimal) {
        if (di < 2 * np) box_ok = false;
        continue;
      }
      if (di < 2 * np) {
        // di even: max along axis di/2; odd: min
        if (di % 2 == 0)
          hi[di / 2] = -lp.objective;
        else
          lo[di / 2] = lp.objective;
      }
      Vec seed = lp.x;
      if (!center.empty()) seed = lp.x + 1e-6 * (center - lp.x);
      work.push_back({seed, {}});
    }
    if (box_ok) {
      int kept = 0, attempts = 0;
      while (kept < opts.random_seeds && attempts < 20 * opts.random_seeds) {
        ++attempts;
        Vec p(np);
        for (std::size_t j = 0; j < np; ++j) p[j] = rng.uniform(lo[j], hi[j]);
        if (theta.max_violation(p) > 0.0) continue;
        work.push_back({p, {}});
        ++kept;
      }
    }
  }

  void build_region(const std::vector<int>& A) {
    const std::size_t a = A.size();
    Matrix Ku;
    Vec ru;
    Matrix Lam(a, np);
    Vec lam0(a);
    if (a == 0) {
      Ku = -1.0 * HiZ;
      ru.assign(nu, 0.0);
    } else {
      Matrix Gat(nu, a);
      for (std::size_t k = 0; k < a; ++k)
        for (std::size_t j = 0; j < nu; ++j) Gat(j, k) = prob.G(A[k], j);
      const Matrix Y = chol_solve(L, Gat);
      const Matrix Sschur = multiply_transposed(Gat, Y);
      Matrix Ls;
      try {
        Ls = cholesky(symmetrized(Sschur));
      } catch (const NumericError&) {
        visited[A] = -1;
        out.notes.push_back("dependent active set " + set_label(A) + " skipped");
        return;
      }
      Matrix T(a, np);  // S_A + G_A H2^{-1} Z
      Vec wa(a);
      for (std::size_t k = 0; k < a; ++k) {
        wa[k] = prob.W[A[k]];
        for (std::size_t j = 0; j < np; ++j) {
          double v = prob.S(A[k], j);
          for (std::size_t t = 0; t < nu; ++t) v += prob.G(A[k], t) * HiZ(t, j);
          T(k, j) = v;
        }
      }
      Lam = -1.0 * chol_solve(Ls, T);
      lam0 = -1.0 * chol_solve(Ls, wa);
      Ku = -1.0 * HiZ - Y * Lam;
      ru = -1.0 * (Y * lam0);
      // the construction forces G_A (Ku th + ru) = S_A th + W_A; verify it
      for (std::size_t k = 0; k < a; ++k) {
        double resid = -wa[k];
        for (std::size_t t = 0; t < nu; ++t) resid += prob.G(A[k], t) * ru[t];
        if (std::fabs(resid) > 1e-7)
          throw NumericError("solve_mpqp: parametric offset check failed");
        for (std::size_t j = 0; j < np; ++j) {
          double gk = -prob.S(A[k], j);
          for (std::size_t t = 0; t < nu; ++t) gk += prob.G(A[k], t) * Ku(t, j);
          if (std::fabs(gk) > 1e-7)
            throw NumericError("solve_mpqp: parametric gain check failed");
        }
      }
    }

    // region rows: primal feasibility of the inactive rows, nonnegativity of
    // the multipliers, then the domain
    const std::size_t qg = prob.W.size();
    Matrix F(qg + theta.size(), np);
    Vec g(qg + theta.size());
    std::vector<RowSource> src(qg + theta.size());
    std::size_t row = 0;
    std::size_t ai = 0;
    for (std::size_t j = 0; j < qg; ++j) {
      if (ai < a && A[ai] == static_cast<int>(j)) {
        // dual row for this active constraint
        for (std::size_t t = 0; t < np; ++t) F(row, t) = -Lam(ai, t);
        g[row] = lam0[ai];
        src[row] = {RowSource::Dual, static_cast<int>(ai)};
        ++ai;
      } else {
        for (std::size_t t = 0; t < np; ++t) {
          double v = -prob.S(j, t);
          for (std::size_t u = 0; u < nu; ++u) v += prob.G(j, u) * Ku(u, t);
          F(row, t) = v;
        }
        double w = prob.W[j];
        for (std::size_t u = 0; u < nu; ++u) w -= prob.G(j, u) * ru[u];
        g[row] = w;
        src[row] = {RowSource::Primal, static_cast<int>(j)};
      }
      ++row;
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      for (std::size_t t = 0; t < np; ++t) F(row, t) = theta.F(i, t);
      g[row] = theta.g[i];
      src[row] = {RowSource::Domain, static_cast<int>(i)};
      ++row;
    }

    const ReduceResult rr = remove_redundant(Polytope(std::move(F), std::move(g)), lp_opts);
    if (rr.status == ReduceStatus::Infeasible) {
      visited[A] = -1;
      return;
    }
    const ChebyshevResult cc = chebyshev_center(rr.poly, lp_opts);
    if (cc.status != SolveStatus::Optimal ||
        cc.radius <= opts.tols.region_min_radius) {
      visited[A] = -1;
      out.notes.push_back("active set " + set_label(A) +
                          " gives a lower-dimensional piece, skipped");
      return;
    }

    MpqpRegion reg;
    reg.dom = rr.poly.normalized();
    reg.gain = std::move(Ku);
    reg.offset = std::move(ru);
    reg.active_set = A;
    reg.chebyshev_radius = cc.radius;
    visited[A] = static_cast<int>(out.regions.size());

    // walk across every facet that borders another region
    for (std::size_t pos = 0; pos < reg.dom.size(); ++pos) {
      const RowSource& s = src[rr.kept[pos]];
      if (s.kind == RowSource::Domain) continue;
      std::vector<int> guess = A;
      if (s.kind == RowSource::Primal) {
        guess.insert(std::upper_bound(guess.begin(), guess.end(), s.index), s.index);
      } else {
        guess.erase(guess.begin() + s.index);
      }
      const auto p = facet_center(reg.dom, pos, lp_opts);
      if (!p) continue;
      const double delta = 1e-7 * std::max(1.0, norm_inf(*p));
      Vec outside = *p;
      for (std::size_t j = 0; j < np; ++j) outside[j] += delta * reg.dom.F(pos, j);
      work.push_back({std::move(outside), std::move(guess)});
    }
    out.regions.push_back(std::move(reg));
  }

  void run() {
    out.n_param = np;
    out.n_seq = nu;
    const ReduceResult dr = remove_redundant(prob.domain, lp_opts);
    if (dr.status == ReduceStatus::Infeasible) {
      out.notes.push_back("parameter domain is empty");
      return;
    }
    theta = dr.poly;
    H2 = symmetrized(2.0 * prob.H);
    L = cholesky(H2);
    HiZ = chol_solve(L, prob.Z);
    enqueue_seeds();

    while (!work.empty()) {
      if (static_cast<int>(out.regions.size()) > opts.max_regions)
        throw NumericError("solve_mpqp: region cap exceeded");
      auto [th, guess] = std::move(work.front());
      work.pop_front();
      if (theta.max_violation(th) > 1e-10) continue;

      QpOptions qo;
      qo.tols = opts.tols;
      qo.warm_active = guess;
      qo.self_check = false;
      QpSolution qs;
      try {
        qs = qp_solve(H2, prob.Z * th, Polytope(prob.G, prob.S * th + prob.W), qo);
        ++out.qp_count;
      } catch (const NumericError& e) {
        out.notes.push_back(std::string("point solve failed: ") + e.what());
        continue;
      }
      if (qs.status != SolveStatus::Optimal) continue;
      std::vector<int> A;
      for (int i : qs.active_set)
        if (qs.duals[i] > opts.tols.dual_strict) A.push_back(i);
      if (visited.count(A)) continue;
      build_region(A);
    }

    std::sort(out.regions.begin(), out.regions.end(),
              [](const MpqpRegion& x, const MpqpRegion& y) {
                return x.active_set < y.active_set;
              });
  }
};

}  // namespace

MpqpSolution solve_mpqp(const MpqpProblem& prob, const MpqpOptions& opts) {
  require(prob.H.rows() == prob.G.cols() && prob.H.cols() == prob.G.cols(),
          "solve_mpqp: H and G widths disagree");
  require(prob.Z.rows() == prob.G.cols(), "solve_mpqp: Z rows mismatch");
  require(prob.Z.cols() == prob.domain.dim(), "solve_mpqp: Z cols mismatch");
  require(prob.S.rows() == prob.G.rows() && prob.W.size() == prob.G.rows(),
          "solve_mpqp: constraint row counts disagree");
  Enumerator e(prob, opts);
  e.run();
  return e.out;
}

int locate_region(const MpqpSolution& sol, const Vec& th, double tol) {
  for (std::size_t i = 0; i < sol.regions.size(); ++i)
    if (sol.regions[i].dom.contains(th, tol)) return static_cast<int>(i);
  return -1;
}

std::optional<Vec> evaluate_pwa(const MpqpSolution& sol, const Vec& th, double tol) {
  const int i = locate_region(sol, th, tol);
  if (i < 0) return std::nullopt;
  return sol.regions[i].gain * th + sol.regions[i].offset;
}

int PwaLaw::locate(const Vec& x, double tol) const {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].dom.contains(x, tol)) return static_cast<int>(i);
  return -1;
}

std::optional<Vec> PwaLaw::evaluate(const Vec& x, double tol) const {
  const int i = locate(x, tol);
  if (i < 0) return std::nullopt;
  return regions[i].K * x + regions[i].r;
}

PwaLaw first_move_law(const MpqpSolution& sol, std::size_t n_input,
                      const Polytope& domain) {
  PwaLaw law;
  law.n_in = sol.n_param;
  law.n_out = n_input;
  law.domain = domain;
  for (const MpqpRegion& reg : sol.regions) {
    PwaRegion r;
    r.dom = reg.dom;
    r.K = reg.gain.block(0, 0, n_input, sol.n_param);
    r.r.assign(reg.offset.begin(), reg.offset.begin() + n_input);
    law.regions.push_back(std::move(r));
  }
  return law;
}

}  // namespace yannrl
