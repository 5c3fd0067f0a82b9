#pragma once

#include <cstddef>

#include "yannrl/matrix.hpp"
#include "yannrl/polytope.hpp"

namespace yannrl {

// Finite-horizon regulator description. The predicted trajectory starts at
// the measured state; constraints apply per step as listed below.
struct MpcDesign {
  Matrix A, B;         // prediction model s+ = A s + B u
  Matrix Qw, R;        // stage weights on state and input
  Matrix P;            // weight on the horizon-end state
  std::size_t horizon = 2;
  Polytope state_set;  // enforced on the start state and every predicted step
  Polytope input_set;  // enforced on every input in the sequence
  // Extra set on one predicted state. Empty reuses state_set. By default it
  // lands one step before the horizon end; the switch moves it to the end.
  Polytope terminal_set;
  bool terminal_at_horizon = false;
};

// Condensed form over the stacked input sequence u = (u_0 ... u_{N-1}) with
// the start state th as parameter:
//   min_u u'H u + u'Z th + th'M th   s.t.   G u <= S th + W,  th in domain.
// Rows that do not touch u (the start-state constraints) live in `domain`.
// Exactly duplicated (G, S, W) rows are dropped, first occurrence kept.
struct MpqpProblem {
  Matrix H, Z, M;
  Matrix G, S;
  Vec W;
  Polytope domain;
  std::size_t n_state = 0, n_input = 0, horizon = 0;
};

MpqpProblem condense_mpc(const MpcDesign& d);

}  // namespace yannrl
