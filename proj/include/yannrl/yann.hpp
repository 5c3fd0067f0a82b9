#pragma once

#include <cstdint>

#include "yannrl/mpqp.hpp"
#include "yannrl/net.hpp"

namespace yannrl {

// Builders that compile piecewise-affine control laws into layered networks
// and attach trainable blocks that start out contributing exactly zero.
//
// Layer layouts are fixed and documented per builder so that tests and the
// trainer can address specific parameter blocks by index.

struct ExactYannOptions {
  // Bias shift applied to the later region's copy of a shared facet so that
  // exactly one region indicator fires on the facet itself. Scaled by the
  // row norm.
  double facet_shift = 1e-9;
  // Two rows count as the same facet with opposite orientation when their
  // unit-normalized coefficients and offsets agree to this tolerance.
  double flip_match_tol = 1e-7;
  // Gate constants are this multiple of the certified bound on |K th + r|.
  double big_m_margin = 10.0;
};

// Per-output gate constants: margin * (max over the law's domain of
// |K_i th + r_i| across all regions i, plus extra[j]), floored at 1. The
// maxima come from LPs over pwa.domain when it is set, otherwise over each
// region. Throws NumericError when any LP is unbounded.
Vec suppression_bounds(const PwaLaw& pwa, double margin, const Vec& extra);

// Exact compilation of a piecewise-affine law. Node layout:
//   0 affine (q x n, frozen)   row tests  -F th + g, later-region shared
//                              facets shifted by -eps
//   1 step
//   2 affine (p x q, frozen)   per-region satisfied-row counts, no bias
//   3 affine (p x p, frozen)   threshold at count - (q_i - 1/2)
//   4 step                     region binaries
//   5 concat(input, 4)
//   6 affine (2pm x (n+p), frozen)  gated law rows, one +/- pair per
//                                   (region, output), gate constant M_j
//   7 relu
//   8 affine (m x 2pm, frozen)      signed sum, no bias
// Output equals the law on every region, 0 where no region fires; gates are
// certified over pwa.domain (the region union when domain is unset).
LayeredNetwork build_exact_yann(const PwaLaw& pwa, const ExactYannOptions& opts = {});

struct ZeroBlockSpec {
  std::size_t in_dim = 0;
  std::size_t hidden = 0;
  std::size_t out_dim = 0;
  double init_scale = 0.01;
  std::uint64_t rng_seed = 0;
};

// Two trainable affine layers whose output is identically zero at
// initialization. Hidden rows come in halves with negated mirrors (odd
// counts zero the last node), so the frozen pairing layer hands the output
// layer an all-zero vector; its weights can therefore be random while the
// bias starts at zero. Node layout:
//   0 affine (hidden x in, trainable)   mirrored init
//   1 tanh
//   2 affine (ceil(h/2) x hidden, frozen)  sums each mirror pair
//   3 affine (out x ceil(h/2), trainable)  random weights, zero bias
LayeredNetwork build_zero_block(const ZeroBlockSpec& spec);

struct ActorOptions {
  double facet_shift = 1e-9;
  double flip_match_tol = 1e-7;
  double big_m_margin = 10.0;
  // The affine law coefficients stay frozen by default so the network can
  // only move away from the solved controller through the corrections.
  bool train_laws = false;
};

// Trainable controller: the exact network's indicator stack, all region laws
// evaluated in parallel, and one zero-initialized correction per (region,
// output) channel. Hidden units are gated by their region's binary before
// the square mixing layer, so a batch drawn from one region moves no other
// region's correction parameters. Node layout:
//   0..4  indicator stack as in build_exact_yann
//   5  affine (pm x n, frozen unless train_laws)  stacked laws K_i th + r_i
//   6  affine (pmh x n, trainable)   correction hidden, mirrored init
//   7  tanh
//   8  affine (pmh x p, frozen)      region binary broadcast, no bias
//   9  pairwise product(7, 8)        gated hidden
//  10  affine (pmh x pmh, trainable) mixing, no bias, mirror-duplicated
//                                    columns so corrections start at zero
//  11  group sum h                   one correction per (region, output)
//  12  concat(4, 5, 11)
//  13  affine (2pm x (p+2pm), frozen) suppression rows relu(+-(law+corr)
//                                     + M_j (b_i - 1))
//  14  relu
//  15  affine (m x 2pm, frozen)       signed sum, no bias
// Gate constants add the largest |u_j| over u_bounds on top of the law
// bound, leaving room for corrections to grow during training.
LayeredNetwork build_yann_actor(const PwaLaw& pwa, const ZeroBlockSpec& spec,
                                const Polytope& u_bounds, const ActorOptions& opts = {});

// Action-value network whose exact branch reproduces the quadratic
//   s' (Qw + g A'PA) s + 2 s' (g A'PB) u + u' (R + g B'PB) u
// through an embedded coefficient matrix and a pairwise product against the
// input, plus a zero block on (s, u) for everything the quadratic cannot
// express. Node layout:
//   0 affine ((n+m) x (n+m), trainable)  embedded coefficients, no bias
//   1 pairwise product(0, input)
//   2 group sum (n+m)                    quadratic value
//   3..6 zero block nodes on the input (hidden = spec.hidden)
//   7 concat(2, 6)
//   8 group sum 2
LayeredNetwork build_yann_critic(const Matrix& A, const Matrix& B, const Matrix& Qw,
                                 const Matrix& R, const Matrix& P, double gamma,
                                 const ZeroBlockSpec& spec);

}  // namespace yannrl
