#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "yannrl/mpc.hpp"
#include "yannrl/qp.hpp"

namespace yannrl {

// One piece of the parametric solution: over `dom` the optimal input
// sequence is gain * th + offset, with the listed rows of G at equality.
struct MpqpRegion {
  Polytope dom;                 // irredundant, rows scaled to unit normals
  Matrix gain;                  // (N m) x n
  Vec offset;                   // N m
  std::vector<int> active_set;  // strictly active rows, ascending
  double chebyshev_radius = 0.0;
};

struct MpqpSolution {
  std::vector<MpqpRegion> regions;  // ordered by active set, lexicographic
  std::size_t n_param = 0, n_seq = 0;
  int qp_count = 0;
  std::vector<std::string> notes;  // skipped degenerate candidates etc.
};

struct MpqpOptions {
  Tolerances tols{};
  int random_seeds = 64;  // extra interior sample points of the domain
  std::uint64_t seed = 17;
  int max_regions = 4096;
};

// Enumerates the critical regions of
//   min_u u'H u + u'Z th   s.t.  G u <= S th + W,  th in domain
// by solving point QPs at seeds and walking across region facets. Regions
// whose Chebyshev radius is at or below tols.region_min_radius are treated
// as lower-dimensional and dropped.
MpqpSolution solve_mpqp(const MpqpProblem& prob, const MpqpOptions& opts = {});

// Index of the first region containing th within tol, or -1.
int locate_region(const MpqpSolution& sol, const Vec& th, double tol = 1e-9);

// Full optimal input sequence at th, empty when th is in no region.
std::optional<Vec> evaluate_pwa(const MpqpSolution& sol, const Vec& th,
                                double tol = 1e-9);

// Piecewise-affine feedback that applies only the head of each planned
// sequence. This is the object the exact network encodes.
struct PwaRegion {
  Polytope dom;
  Matrix K;  // n_out x n_in
  Vec r;
};

struct PwaLaw {
  std::vector<PwaRegion> regions;
  // Convex set the law is meant to be queried over; the union of the region
  // domains when nothing wider is known. Network gate bounds are certified
  // over this set.
  Polytope domain;
  std::size_t n_in = 0, n_out = 0;

  int locate(const Vec& x, double tol = 1e-9) const;
  std::optional<Vec> evaluate(const Vec& x, double tol = 1e-9) const;
};

PwaLaw first_move_law(const MpqpSolution& sol, std::size_t n_input,
                      const Polytope& domain = {});

}  // namespace yannrl
