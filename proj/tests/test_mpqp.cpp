#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "yannrl/dare.hpp"
#include "yannrl/discretize.hpp"
#include "yannrl/envs.hpp"
#include "yannrl/mpqp.hpp"
#include "yannrl/rng.hpp"

using namespace yannrl;

namespace {

// saturated regulator in one variable: min (1/2)u^2 + u*th, |u| <= 1
MpqpProblem clamp_problem() {
  MpqpProblem p;
  p.H = Matrix{{0.5}};
  p.Z = Matrix{{1.0}};
  p.M = Matrix{{0.0}};
  p.G = Matrix{{1.0}, {-1.0}};
  p.S = Matrix(2, 1);
  p.W = {1.0, 1.0};
  p.domain = Polytope::box({-3.0}, {3.0});
  p.n_state = 1;
  p.n_input = 1;
  p.horizon = 1;
  return p;
}

MpcDesign swingup_design() {
  // library derivation (differentiate + hold), cross-checked against the
  // direct discretization of the known tangent system
  const MpcDesign d = make_linear_design(PendulumParams{});
  const DiscreteSystem sys =
      zoh_discretize(Matrix{{0.0, 1.0}, {15.0, 0.0}}, Matrix{{0.0}, {3.0}}, 0.05);
  REQUIRE(max_abs_diff(d.A, sys.A) <= 1e-9);
  REQUIRE(max_abs_diff(d.B, sys.B) <= 1e-9);
  return d;
}

Vec qp_at(const MpqpProblem& p, const Vec& th, SolveStatus& status) {
  const Matrix H2 = 2.0 * p.H;
  QpOptions qo;
  qo.self_check = false;
  const QpSolution qs = qp_solve(H2, p.Z * th, Polytope(p.G, p.S * th + p.W), qo);
  status = qs.status;
  return qs.x;
}

}  // namespace

TEST_CASE("saturated one-dimensional law comes out in closed form") {
  const MpqpSolution sol = solve_mpqp(clamp_problem());
  REQUIRE(sol.regions.size() == 3);

  // ordered by active set: {} then {0} then {1}
  CHECK(sol.regions[0].active_set.empty());
  CHECK(sol.regions[0].gain(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::fabs(sol.regions[0].offset[0]) <= 1e-12);

  CHECK(sol.regions[1].active_set == std::vector<int>{0});
  CHECK(std::fabs(sol.regions[1].gain(0, 0)) <= 1e-12);
  CHECK(sol.regions[1].offset[0] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(sol.regions[2].active_set == std::vector<int>{1});
  CHECK(sol.regions[2].offset[0] == doctest::Approx(-1.0).epsilon(1e-12));

  for (double th = -3.0; th <= 3.0; th += 0.01) {
    const auto u = evaluate_pwa(sol, {th});
    REQUIRE(u.has_value());
    const double expect = std::clamp(-th, -1.0, 1.0);
    CHECK(std::fabs((*u)[0] - expect) <= 1e-10);
  }

  // boundary points belong to both neighbors and the laws agree there
  for (double b : {-1.0, 1.0}) {
    int owners = 0;
    for (const MpqpRegion& reg : sol.regions)
      if (reg.dom.contains({b}, 1e-9)) ++owners;
    CHECK(owners == 2);
  }
}

TEST_CASE("random two-parameter problems agree with point solves on a grid") {
  Rng rng(0x4242u);
  for (int trial = 0; trial < 5; ++trial) {
    MpqpProblem p;
    Matrix A(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    p.H = multiply_transposed(A, A);
    p.H(0, 0) += 0.4;
    p.H(1, 1) += 0.4;
    p.Z = Matrix(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) p.Z(i, j) = rng.uniform(-1.5, 1.5);
    p.M = Matrix(2, 2);
    const Polytope ubox = Polytope::box({-1.0, -1.0}, {1.0, 1.0});
    p.G = Matrix(5, 2);
    p.S = Matrix(5, 2);
    p.W.assign(5, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
      p.G(i, 0) = ubox.F(i, 0);
      p.G(i, 1) = ubox.F(i, 1);
      p.W[i] = 1.0;
    }
    // one coupling row ties the inputs to the parameter
    p.G(4, 0) = 1.0;
    p.G(4, 1) = 1.0;
    p.S(4, 0) = rng.uniform(-0.5, 0.5);
    p.S(4, 1) = rng.uniform(-0.5, 0.5);
    p.W[4] = rng.uniform(0.5, 1.5);
    p.domain = Polytope::box({-2.0, -2.0}, {2.0, 2.0});

    const MpqpSolution sol = solve_mpqp(p);
    REQUIRE(!sol.regions.empty());

    int agreements = 0;
    for (int gx = 0; gx <= 20; ++gx) {
      for (int gy = 0; gy <= 20; ++gy) {
        const Vec th = {-2.0 + 4.0 * gx / 20.0, -2.0 + 4.0 * gy / 20.0};
        SolveStatus st;
        const Vec u = qp_at(p, th, st);
        const auto pw = evaluate_pwa(sol, th);
        if (st == SolveStatus::Optimal) {
          REQUIRE(pw.has_value());
          CHECK(max_abs_diff(u, *pw) <= 1e-6);
          ++agreements;
        } else {
          CHECK_FALSE(pw.has_value());
        }
      }
    }
    CHECK(agreements > 100);
  }
}

TEST_CASE("unstable second-order regulator enumerates nine saturation patterns") {
  const MpcDesign d = swingup_design();
  const MpqpProblem p = condense_mpc(d);
  const MpqpSolution sol = solve_mpqp(p);

  // both inputs can saturate independently and in opposite directions: the
  // condensed input columns are nearly parallel, so opposite-sign saturation
  // wins in a wedge near the position bound. 4 single + 4 double + interior.
  REQUIRE(sol.regions.size() == 9);
  std::set<std::vector<int>> want = {{},     {0},    {0, 2}, {0, 3}, {1},
                                     {1, 2}, {1, 3}, {2},    {3}};
  std::set<std::vector<int>> got;
  for (const MpqpRegion& reg : sol.regions) got.insert(reg.active_set);
  CHECK(got == want);

  // each region certifies itself: the point solve at its own center comes
  // back with the same rows active and strictly positive multipliers
  for (const MpqpRegion& reg : sol.regions) {
    const ChebyshevResult cc = chebyshev_center(reg.dom);
    REQUIRE(cc.status == SolveStatus::Optimal);
    QpOptions qo;
    const QpSolution qs =
        qp_solve(2.0 * p.H, p.Z * cc.center, Polytope(p.G, p.S * cc.center + p.W), qo);
    REQUIRE(qs.status == SolveStatus::Optimal);
    CHECK(qs.active_set == reg.active_set);
    for (int row : qs.active_set) CHECK(qs.duals[static_cast<std::size_t>(row)] > 1e-9);
  }

  // distinct active sets, each region full-dimensional with unit row norms
  std::set<std::vector<int>> keys;
  for (const MpqpRegion& reg : sol.regions) {
    keys.insert(reg.active_set);
    CHECK(reg.chebyshev_radius > 1e-9);
    for (std::size_t i = 0; i < reg.dom.size(); ++i) {
      double nrm = 0.0;
      for (std::size_t j = 0; j < reg.dom.dim(); ++j)
        nrm += reg.dom.F(i, j) * reg.dom.F(i, j);
      CHECK(std::fabs(std::sqrt(nrm) - 1.0) <= 1e-12);
    }
  }
  CHECK(keys.size() == sol.regions.size());

  // grid agreement with point solves, both directions
  Rng rng(0x7e57u);
  int feasible = 0;
  for (int k = 0; k < 600; ++k) {
    const Vec th = {rng.uniform(-2.0, 2.0), rng.uniform(-8.0, 8.0)};
    SolveStatus st;
    const Vec u = qp_at(p, th, st);
    const auto pw = evaluate_pwa(sol, th);
    if (st == SolveStatus::Optimal) {
      REQUIRE(pw.has_value());
      CHECK(max_abs_diff(u, *pw) <= 1e-6);
      ++feasible;
    } else {
      CHECK_FALSE(pw.has_value());
    }
  }
  CHECK(feasible > 300);

  // adjacent regions agree where they touch: the deepest point of each
  // pairwise intersection is a shared-facet point, and both laws must give
  // the same input there
  int adjacent_pairs = 0;
  for (std::size_t i = 0; i < sol.regions.size(); ++i) {
    for (std::size_t j = i + 1; j < sol.regions.size(); ++j) {
      const Polytope both = sol.regions[i].dom.appended(sol.regions[j].dom);
      const ChebyshevResult cc = chebyshev_center(both);
      if (cc.status != SolveStatus::Optimal || cc.radius < -1e-7) continue;
      ++adjacent_pairs;
      const MpqpRegion& ri = sol.regions[i];
      const MpqpRegion& rj = sol.regions[j];
      const Vec ui = ri.gain * cc.center + ri.offset;
      const Vec uj = rj.gain * cc.center + rj.offset;
      CHECK(max_abs_diff(ui, uj) <= 1e-6);
      // interiors stay disjoint: the overlap has no volume
      CHECK(cc.radius <= 1e-7);
    }
  }
  CHECK(adjacent_pairs >= 8);

  // the head of the sequence is the feedback the network will encode
  const PwaLaw law = first_move_law(sol, p.n_input);
  REQUIRE(law.regions.size() == sol.regions.size());
  for (int k = 0; k < 100; ++k) {
    const Vec th = {rng.uniform(-2.0, 2.0), rng.uniform(-8.0, 8.0)};
    const auto full = evaluate_pwa(sol, th);
    const auto head = law.evaluate(th);
    REQUIRE(full.has_value() == head.has_value());
    if (full) CHECK(std::fabs((*full)[0] - (*head)[0]) <= 1e-12);
  }
}

TEST_CASE("reactor regulator with a late-acting input partitions into seven pieces") {
  // scalar input that only drives the last state: the first three predicted
  // state rows never see u and must be routed into the parameter domain
  const MpcDesign d = make_linear_design(CstrParams{});

  const MpqpProblem p = condense_mpc(d);
  CHECK(p.G.rows() == 6);        // 4 input rows + 2 rows of the driven state
  CHECK(p.domain.size() == 14);  // box + 6 undriven predicted-state rows

  const MpqpSolution sol = solve_mpqp(p);
  REQUIRE(sol.regions.size() == 7);
  std::set<std::vector<int>> want = {{}, {0}, {0, 2}, {1}, {1, 3}, {2}, {3}};
  std::set<std::vector<int>> got;
  for (const MpqpRegion& reg : sol.regions) got.insert(reg.active_set);
  CHECK(got == want);

  for (const MpqpRegion& reg : sol.regions) {
    const ChebyshevResult cc = chebyshev_center(reg.dom);
    REQUIRE(cc.status == SolveStatus::Optimal);
    QpOptions qo;
    const QpSolution qs =
        qp_solve(2.0 * p.H, p.Z * cc.center, Polytope(p.G, p.S * cc.center + p.W), qo);
    REQUIRE(qs.status == SolveStatus::Optimal);
    CHECK(qs.active_set == reg.active_set);
  }

  Rng rng(0xc57fu);
  int feasible = 0;
  for (int k = 0; k < 600; ++k) {
    const Vec th = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                    rng.uniform(-2.0, 2.0), rng.uniform(-70.0, 5.0)};
    SolveStatus st;
    const Vec u = qp_at(p, th, st);
    const auto pw = evaluate_pwa(sol, th);
    // the G-row solve alone cannot see the domain rows (they have no input
    // coefficients), so feasibility needs both checks
    if (st == SolveStatus::Optimal && p.domain.contains(th, 1e-9)) {
      REQUIRE(pw.has_value());
      CHECK(max_abs_diff(u, *pw) <= 1e-6);
      ++feasible;
    } else if (st != SolveStatus::Optimal) {
      CHECK_FALSE(pw.has_value());
    }
  }
  CHECK(feasible > 200);
}
