#include "yannrl/mpc.hpp"

#include <cmath>
#include <vector>

namespace yannrl {

MpqpProblem condense_mpc(const MpcDesign& d) {
  const std::size_t n = d.A.rows();
  const std::size_t m = d.B.cols();
  const std::size_t N = d.horizon;
  require(N >= 1, "condense_mpc: horizon must be at least 1");
  require(d.A.cols() == n && d.B.rows() == n, "condense_mpc: A/B shape mismatch");
  require(d.Qw.rows() == n && d.Qw.cols() == n, "condense_mpc: Qw shape mismatch");
  require(d.R.rows() == m && d.R.cols() == m, "condense_mpc: R shape mismatch");
  require(d.P.rows() == n && d.P.cols() == n, "condense_mpc: P shape mismatch");
  require(d.state_set.dim() == n, "condense_mpc: state set dimension mismatch");
  require(d.input_set.dim() == m, "condense_mpc: input set dimension mismatch");

  // phi[t] = A^t; gamma[t] maps the input sequence to s_t.
  std::vector<Matrix> phi(N + 1);
  std::vector<Matrix> gamma(N + 1, Matrix(n, N * m));
  phi[0] = Matrix::identity(n);
  for (std::size_t t = 1; t <= N; ++t) {
    phi[t] = d.A * phi[t - 1];
    for (std::size_t j = 0; j < t; ++j)
      gamma[t].set_block(0, j * m, phi[t - 1 - j] * d.B);
  }

  MpqpProblem out;
  out.n_state = n;
  out.n_input = m;
  out.horizon = N;

  // Quadratic pieces: sum of stage costs along the predicted trajectory
  // plus the horizon-end weight.
  out.H = Matrix(N * m, N * m);
  out.Z = Matrix(N * m, n);
  out.M = Matrix(n, n);
  for (std::size_t t = 0; t <= N; ++t) {
    const Matrix& weight = (t == N) ? d.P : d.Qw;
    if (t > 0) {
      const Matrix WG = weight * gamma[t];
      out.H += multiply_transposed(gamma[t], WG);
      out.Z += 2.0 * multiply_transposed(gamma[t], weight * phi[t]);
    }
    out.M += multiply_transposed(phi[t], weight * phi[t]);
  }
  for (std::size_t t = 0; t < N; ++t)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out.H(t * m + i, t * m + j) += d.R(i, j);

  // Constraint rows, assembled in a fixed order: inputs per step, states per
  // step, then the extra terminal rows.
  struct Row {
    Vec G, S;
    double W;
  };
  std::vector<Row> rows;
  auto push_state_rows = [&](const Polytope& set, std::size_t t) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      Row r;
      r.G.assign(N * m, 0.0);
      r.S.assign(n, 0.0);
      for (std::size_t j = 0; j < N * m; ++j)
        for (std::size_t k = 0; k < n; ++k) r.G[j] += set.F(i, k) * gamma[t](k, j);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) r.S[j] -= set.F(i, k) * phi[t](k, j);
      r.W = set.g[i];
      rows.push_back(std::move(r));
    }
  };

  for (std::size_t t = 0; t < N; ++t) {
    for (std::size_t i = 0; i < d.input_set.size(); ++i) {
      Row r;
      r.G.assign(N * m, 0.0);
      r.S.assign(n, 0.0);
      for (std::size_t j = 0; j < m; ++j) r.G[t * m + j] = d.input_set.F(i, j);
      r.W = d.input_set.g[i];
      rows.push_back(std::move(r));
    }
  }
  for (std::size_t t = 1; t < N; ++t) push_state_rows(d.state_set, t);
  {
    const Polytope& term = d.terminal_set.size() > 0 ? d.terminal_set : d.state_set;
    require(term.dim() == n, "condense_mpc: terminal set dimension mismatch");
    const std::size_t t_star = d.terminal_at_horizon ? N : N - 1;
    if (t_star == 0) {
      // degenerate horizon: the terminal rows constrain the parameter only
      for (std::size_t i = 0; i < term.size(); ++i) {
        Row r;
        r.G.assign(N * m, 0.0);
        r.S.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) r.S[j] = -term.F(i, j);
        r.W = term.g[i];
        rows.push_back(std::move(r));
      }
    } else {
      push_state_rows(term, t_star);
    }
  }

  // Drop exact duplicates; route rows without input coefficients into the
  // parameter domain as -S th <= W.
  std::vector<Row> uniq;
  for (const Row& r : rows) {
    bool dup = false;
    for (const Row& u : uniq) {
      if (u.W != r.W || u.G != r.G || u.S != r.S) continue;
      dup = true;
      break;
    }
    if (!dup) uniq.push_back(r);
  }
  std::vector<const Row*> g_rows, th_rows;
  for (const Row& r : uniq) {
    bool zero = true;
    for (double v : r.G)
      if (v != 0.0) {
        zero = false;
        break;
      }
    (zero ? th_rows : g_rows).push_back(&r);
  }

  out.G = Matrix(g_rows.size(), N * m);
  out.S = Matrix(g_rows.size(), n);
  out.W.assign(g_rows.size(), 0.0);
  for (std::size_t i = 0; i < g_rows.size(); ++i) {
    for (std::size_t j = 0; j < N * m; ++j) out.G(i, j) = g_rows[i]->G[j];
    for (std::size_t j = 0; j < n; ++j) out.S(i, j) = g_rows[i]->S[j];
    out.W[i] = g_rows[i]->W;
  }

  Matrix dF(d.state_set.size() + th_rows.size(), n);
  Vec dg(d.state_set.size() + th_rows.size());
  for (std::size_t i = 0; i < d.state_set.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) dF(i, j) = d.state_set.F(i, j);
    dg[i] = d.state_set.g[i];
  }
  for (std::size_t i = 0; i < th_rows.size(); ++i) {
    const std::size_t r = d.state_set.size() + i;
    for (std::size_t j = 0; j < n; ++j) dF(r, j) = -th_rows[i]->S[j];
    dg[r] = th_rows[i]->W;
  }
  out.domain = Polytope(std::move(dF), std::move(dg));
  return out;
}

}  // namespace yannrl
