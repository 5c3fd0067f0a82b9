#include "yannrl/yann.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yannrl/errors.hpp"
#include "yannrl/lp.hpp"
#include "yannrl/rng.hpp"

namespace yannrl {

namespace {

void check_law(const PwaLaw& pwa) {
  require(!pwa.regions.empty(), "yann: law has no regions");
  require(pwa.n_in > 0 && pwa.n_out > 0, "yann: law dimensions unset");
  for (const PwaRegion& reg : pwa.regions) {
    require(reg.dom.dim() == pwa.n_in && reg.dom.size() > 0, "yann: region domain shape");
    require(reg.K.rows() == pwa.n_out && reg.K.cols() == pwa.n_in, "yann: region gain shape");
    require(reg.r.size() == pwa.n_out, "yann: region offset shape");
  }
}

double row_norm(const Matrix& F, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < F.cols(); ++j) s += F(i, j) * F(i, j);
  return std::sqrt(s);
}

// Largest |K_row . th + r| over one polytope, by two LPs.
double abs_bound(const Vec& k_row, double r, const Polytope& dom) {
  Vec c(k_row.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = -k_row[j];
  LpSolution hi = lp_solve(c, dom);
  for (double& v : c) v = -v;
  LpSolution lo = lp_solve(c, dom);
  if (hi.status == SolveStatus::Unbounded || lo.status == SolveStatus::Unbounded)
    throw NumericError("yann: law unbounded over its domain, cannot size gates");
  if (hi.status != SolveStatus::Optimal || lo.status != SolveStatus::Optimal)
    throw NumericError("yann: gate bound LP failed");
  return std::max(std::abs(-hi.objective + r), std::abs(lo.objective + r));
}

}  // namespace

Vec suppression_bounds(const PwaLaw& pwa, double margin, const Vec& extra) {
  check_law(pwa);
  require(extra.empty() || extra.size() == pwa.n_out, "yann: extra bound shape");
  Vec m(pwa.n_out, 0.0);
  for (std::size_t j = 0; j < pwa.n_out; ++j) {
    double worst = 0.0;
    for (const PwaRegion& reg : pwa.regions) {
      const Vec k_row = reg.K.extract_row(j);
      if (pwa.domain.size() > 0) {
        worst = std::max(worst, abs_bound(k_row, reg.r[j], pwa.domain));
      } else {
        for (const PwaRegion& other : pwa.regions)
          worst = std::max(worst, abs_bound(k_row, reg.r[j], other.dom));
      }
    }
    if (!extra.empty()) worst += extra[j];
    m[j] = std::max(margin * worst, 1.0);
  }
  return m;
}

namespace {

struct IndicatorStack {
  Matrix W1;  // q x n, rows -F with the later copy of shared facets shifted
  Vec b1;
  Matrix W2;  // p x q, ones over each region's rows
  Matrix W3;  // p x p identity
  Vec b3;     // -(q_i - 1/2)
};

IndicatorStack build_indicator_stack(const PwaLaw& pwa, double facet_shift,
                                     double flip_tol) {
  const std::size_t n = pwa.n_in;
  const std::size_t p = pwa.regions.size();
  std::size_t q = 0;
  for (const PwaRegion& reg : pwa.regions) q += reg.dom.size();

  IndicatorStack st;
  st.W1 = Matrix(q, n);
  st.b1 = Vec(q, 0.0);
  st.W2 = Matrix(p, q);
  st.W3 = Matrix::identity(p);
  st.b3 = Vec(p, 0.0);

  // unit-normalized copies of all rows seen so far, for facet matching
  Matrix seen_dir(q, n);
  Vec seen_off(q, 0.0);
  std::vector<std::size_t> seen_region(q, 0);

  std::size_t row = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const Polytope& dom = pwa.regions[i].dom;
    for (std::size_t a = 0; a < dom.size(); ++a, ++row) {
      const double nrm = row_norm(dom.F, a);
      require(nrm > 0.0, "yann: zero region facet row");
      for (std::size_t j = 0; j < n; ++j) seen_dir(row, j) = dom.F(a, j) / nrm;
      seen_off[row] = dom.g[a] / nrm;
      seen_region[row] = i;

      // a row of an earlier region describing this hyperplane with the
      // opposite orientation means the facet is shared; the earlier region
      // keeps it, this copy retreats by eps
      bool shared = false;
      for (std::size_t b = 0; b < row && !shared; ++b) {
        if (seen_region[b] == i) continue;
        if (std::abs(seen_off[b] + seen_off[row]) > flip_tol) continue;
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          diff = std::max(diff, std::abs(seen_dir(b, j) + seen_dir(row, j)));
        shared = diff <= flip_tol;
      }

      for (std::size_t j = 0; j < n; ++j) st.W1(row, j) = -dom.F(a, j);
      st.b1[row] = dom.g[a] - (shared ? facet_shift * nrm : 0.0);
      st.W2(i, row) = 1.0;
    }
    st.b3[i] = -(static_cast<double>(dom.size()) - 0.5);
  }
  return st;
}

// Rows +-(v_ij) + M_j (b_i - 1) of the gate layer. `law_cols` is where the
// law values sit in the layer's input; `corr_cols` is npos-like (q) when the
// network has no correction branch. Columns: binaries at b_off.
Matrix gate_rows(std::size_t p, std::size_t m, std::size_t in_width, std::size_t b_off,
                 std::size_t law_off, std::size_t corr_off, bool has_corr, const Vec& M,
                 const PwaLaw* theta_laws, Vec* bias) {
  Matrix W(2 * p * m, in_width);
  bias->assign(2 * p * m, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t rp = (i * m + j) * 2, rm = rp + 1;
      W(rp, b_off + i) = M[j];
      W(rm, b_off + i) = M[j];
      if (theta_laws) {
        // law evaluated in place over the raw parameter columns
        const PwaRegion& reg = theta_laws->regions[i];
        for (std::size_t c = 0; c < theta_laws->n_in; ++c) {
          W(rp, law_off + c) = reg.K(j, c);
          W(rm, law_off + c) = -reg.K(j, c);
        }
        (*bias)[rp] = reg.r[j] - M[j];
        (*bias)[rm] = -reg.r[j] - M[j];
      } else {
        // law arrives precomputed as input columns
        W(rp, law_off + i * m + j) = 1.0;
        W(rm, law_off + i * m + j) = -1.0;
        (*bias)[rp] = -M[j];
        (*bias)[rm] = -M[j];
      }
      if (has_corr) {
        W(rp, corr_off + i * m + j) = 1.0;
        W(rm, corr_off + i * m + j) = -1.0;
      }
    }
  return W;
}

Matrix signed_sum_rows(std::size_t p, std::size_t m) {
  Matrix W(m, 2 * p * m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      W(j, (i * m + j) * 2) = 1.0;
      W(j, (i * m + j) * 2 + 1) = -1.0;
    }
  return W;
}

// Mirrored random rows: the second half is the negated first half; an odd
// count leaves the final row (and bias) at zero.
void fill_mirrored(Matrix& W, Vec& b, std::size_t r0, std::size_t rows, double scale,
                   Rng& rng) {
  const std::size_t half = rows / 2;
  for (std::size_t t = 0; t < half; ++t)
    for (std::size_t j = 0; j < W.cols(); ++j) {
      W(r0 + t, j) = rng.uniform(-scale, scale);
      W(r0 + half + t, j) = -W(r0 + t, j);
    }
  for (std::size_t t = 0; t < half; ++t) {
    b[r0 + t] = rng.uniform(-scale, scale);
    b[r0 + half + t] = -b[r0 + t];
  }
}

Matrix pair_sum_rows(std::size_t hidden) {
  const std::size_t half = hidden / 2;
  const std::size_t rows = (hidden + 1) / 2;
  Matrix P(rows, hidden);
  for (std::size_t t = 0; t < half; ++t) {
    P(t, t) = 1.0;
    P(t, t + half) = 1.0;
  }
  if (hidden % 2 == 1) P(rows - 1, hidden - 1) = 1.0;
  return P;
}

}  // namespace

LayeredNetwork build_exact_yann(const PwaLaw& pwa, const ExactYannOptions& opts) {
  check_law(pwa);
  const std::size_t n = pwa.n_in, m = pwa.n_out, p = pwa.regions.size();
  const Vec M = suppression_bounds(pwa, opts.big_m_margin, {});
  IndicatorStack st = build_indicator_stack(pwa, opts.facet_shift, opts.flip_match_tol);

  LayeredNetwork net;
  net.input_dim = n;
  net.output_dim = m;
  net.layers.push_back(affine_layer(std::move(st.W1), std::move(st.b1), false));
  net.layers.push_back(activation_layer(Act::Step, {0}));
  net.layers.push_back(affine_layer_no_bias(std::move(st.W2), false, {1}));
  net.layers.push_back(affine_layer(std::move(st.W3), std::move(st.b3), false, {2}));
  net.layers.push_back(activation_layer(Act::Step, {3}));
  net.layers.push_back(concat_layer({-1, 4}));

  Vec gate_bias;
  Matrix gate = gate_rows(p, m, n + p, n, 0, 0, false, M, &pwa, &gate_bias);
  net.layers.push_back(affine_layer(std::move(gate), std::move(gate_bias), false, {5}));
  net.layers.push_back(activation_layer(Act::Relu, {6}));
  net.layers.push_back(affine_layer_no_bias(signed_sum_rows(p, m), false, {7}));
  net.validate();
  return net;
}

LayeredNetwork build_zero_block(const ZeroBlockSpec& spec) {
  require(spec.in_dim > 0 && spec.hidden > 0 && spec.out_dim > 0, "zero block: dimensions");
  require(spec.init_scale > 0.0, "zero block: init_scale must be positive");
  Rng rng(spec.rng_seed);

  Matrix W1(spec.hidden, spec.in_dim);
  Vec b1(spec.hidden, 0.0);
  fill_mirrored(W1, b1, 0, spec.hidden, spec.init_scale, rng);

  const std::size_t pairs = (spec.hidden + 1) / 2;
  Matrix W2(spec.out_dim, pairs);
  for (std::size_t i = 0; i < spec.out_dim; ++i)
    for (std::size_t j = 0; j < pairs; ++j) W2(i, j) = rng.uniform(-spec.init_scale, spec.init_scale);

  LayeredNetwork net;
  net.input_dim = spec.in_dim;
  net.output_dim = spec.out_dim;
  net.layers.push_back(affine_layer(std::move(W1), std::move(b1), true));
  net.layers.push_back(activation_layer(Act::Tanh, {0}));
  net.layers.push_back(affine_layer_no_bias(pair_sum_rows(spec.hidden), false, {1}));
  net.layers.push_back(affine_layer(std::move(W2), Vec(spec.out_dim, 0.0), true, {2}));
  net.validate();
  return net;
}

LayeredNetwork build_yann_actor(const PwaLaw& pwa, const ZeroBlockSpec& spec,
                                const Polytope& u_bounds, const ActorOptions& opts) {
  check_law(pwa);
  const std::size_t n = pwa.n_in, m = pwa.n_out, p = pwa.regions.size();
  const std::size_t h = spec.hidden;
  require(h > 0, "actor: hidden size");
  require(spec.in_dim == 0 || spec.in_dim == n, "actor: zero block in_dim disagrees");
  require(spec.init_scale > 0.0, "actor: init_scale must be positive");
  Rng rng(spec.rng_seed);

  // room for the corrections to grow: |u_j| over the input constraint set
  Vec extra(m, 0.0);
  if (u_bounds.size() > 0) {
    require(u_bounds.dim() == m, "actor: u_bounds dimension");
    for (std::size_t j = 0; j < m; ++j) {
      Vec c(m, 0.0);
      c[j] = -1.0;
      LpSolution hi = lp_solve(c, u_bounds);
      c[j] = 1.0;
      LpSolution lo = lp_solve(c, u_bounds);
      if (hi.status != SolveStatus::Optimal || lo.status != SolveStatus::Optimal)
        throw NumericError("actor: input bound LP failed");
      extra[j] = std::max(std::abs(-hi.objective), std::abs(lo.objective));
    }
  }
  const Vec M = suppression_bounds(pwa, opts.big_m_margin, extra);
  IndicatorStack st = build_indicator_stack(pwa, opts.facet_shift, opts.flip_match_tol);

  LayeredNetwork net;
  net.input_dim = n;
  net.output_dim = m;
  net.layers.push_back(affine_layer(std::move(st.W1), std::move(st.b1), false));
  net.layers.push_back(activation_layer(Act::Step, {0}));
  net.layers.push_back(affine_layer_no_bias(std::move(st.W2), false, {1}));
  net.layers.push_back(affine_layer(std::move(st.W3), std::move(st.b3), false, {2}));
  net.layers.push_back(activation_layer(Act::Step, {3}));  // 4: region binaries

  Matrix Klaw(p * m, n);
  Vec rlaw(p * m, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t c = 0; c < n; ++c) Klaw(i * m + j, c) = pwa.regions[i].K(j, c);
      rlaw[i * m + j] = pwa.regions[i].r[j];
    }
  net.layers.push_back(affine_layer(std::move(Klaw), std::move(rlaw), opts.train_laws));  // 5

  // correction hidden: h mirrored nodes per (region, output) channel
  const std::size_t width = p * m * h;
  Matrix Wh(width, n);
  Vec bh(width, 0.0);
  for (std::size_t blk = 0; blk < p * m; ++blk)
    fill_mirrored(Wh, bh, blk * h, h, spec.init_scale, rng);
  net.layers.push_back(affine_layer(std::move(Wh), std::move(bh), true));  // 6
  net.layers.push_back(activation_layer(Act::Tanh, {6}));                  // 7

  Matrix expand(width, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < m * h; ++j) expand(i * m * h + j, i) = 1.0;
  net.layers.push_back(affine_layer_no_bias(std::move(expand), false, {4}));  // 8
  net.layers.push_back(pairwise_product_layer({7, 8}));                       // 9

  // square mixing layer; duplicated column halves inside every source block
  // cancel the mirrored hidden values, so all corrections start at zero
  const std::size_t half = h / 2;
  Matrix Wm(width, width);
  for (std::size_t r = 0; r < width; ++r)
    for (std::size_t blk = 0; blk < p * m; ++blk) {
      for (std::size_t t = 0; t < half; ++t) {
        Wm(r, blk * h + t) = rng.uniform(-spec.init_scale, spec.init_scale);
        Wm(r, blk * h + half + t) = Wm(r, blk * h + t);
      }
      if (h % 2 == 1) Wm(r, blk * h + h - 1) = rng.uniform(-spec.init_scale, spec.init_scale);
    }
  net.layers.push_back(affine_layer_no_bias(std::move(Wm), true, {9}));  // 10
  net.layers.push_back(group_sum_layer(h, {10}));                        // 11
  net.layers.push_back(concat_layer({4, 5, 11}));                        // 12

  Vec gate_bias;
  Matrix gate = gate_rows(p, m, p + 2 * p * m, 0, p, p + p * m, true, M, nullptr, &gate_bias);
  net.layers.push_back(affine_layer(std::move(gate), std::move(gate_bias), false, {12}));  // 13
  net.layers.push_back(activation_layer(Act::Relu, {13}));                                 // 14
  net.layers.push_back(affine_layer_no_bias(signed_sum_rows(p, m), false, {14}));          // 15
  net.validate();
  return net;
}

LayeredNetwork build_yann_critic(const Matrix& A, const Matrix& B, const Matrix& Qw,
                                 const Matrix& R, const Matrix& P, double gamma,
                                 const ZeroBlockSpec& spec) {
  const std::size_t n = A.rows(), m = B.cols();
  require(A.cols() == n && B.rows() == n, "critic: system shapes");
  require(Qw.rows() == n && Qw.cols() == n && R.rows() == m && R.cols() == m &&
              P.rows() == n && P.cols() == n,
          "critic: weight shapes");
  require(gamma > 0.0 && gamma <= 1.0, "critic: gamma in (0, 1]");
  require(spec.hidden > 0, "critic: hidden size");

  const Matrix PA = P * A, PB = P * B;
  Matrix embed(n + m, n + m);
  embed.set_block(0, 0, Qw + gamma * multiply_transposed(A, PA));
  embed.set_block(0, n, gamma * multiply_transposed(A, PB));
  embed.set_block(n, 0, gamma * multiply_transposed(B, PA));
  embed.set_block(n, n, R + gamma * multiply_transposed(B, PB));

  ZeroBlockSpec zb = spec;
  zb.in_dim = n + m;
  zb.out_dim = 1;
  LayeredNetwork block = build_zero_block(zb);

  LayeredNetwork net;
  net.input_dim = n + m;
  net.output_dim = 1;
  net.layers.push_back(affine_layer_no_bias(std::move(embed), true));  // 0
  net.layers.push_back(pairwise_product_layer({0, -1}));               // 1
  net.layers.push_back(group_sum_layer(n + m, {1}));                   // 2

  // splice the zero block in after the quadratic branch (nodes 3..6)
  const int base = 3;
  for (std::size_t k = 0; k < block.layers.size(); ++k) {
    Layer l = std::move(block.layers[k]);
    for (int& id : l.inputs)
      if (id >= 0) id += base;
    net.layers.push_back(std::move(l));
  }
  net.layers.push_back(concat_layer({2, base + 3}));  // 7
  net.layers.push_back(group_sum_layer(2, {7}));      // 8
  net.validate();
  return net;
}

}  // namespace yannrl
