#pragma once

#include <cstddef>

namespace yannrl {

// Central tolerance record. Solvers take these as defaulted arguments and
// report the value they actually used in their result structs.
struct Tolerances {
  double lp_feas = 1e-9;        // simplex feasibility / pivot threshold
  double lp_opt = 1e-9;         // simplex reduced-cost threshold
  double qp_kkt = 1e-8;         // max KKT residual accepted on QP returns
  double qp_active = 1e-9;      // constraint considered active within this
  double dual_strict = 1e-9;    // duals below this count as weakly active
  double dare = 1e-10;          // Riccati fixed-point successive-diff stop
  std::size_t dare_max_iter = 100000;
  double expm = 1e-10;          // relative accuracy target for expm
  double region_min_radius = 1e-9;  // Chebyshev radius for full-dimensional
  double pwa_contain = 1e-9;    // point-in-region slack for evaluate_pwa
  double facet_shift = 1e-9;    // indicator bias shift, scaled by row norm
};

inline const Tolerances& default_tols() {
  static const Tolerances t{};
  return t;
}

}  // namespace yannrl
