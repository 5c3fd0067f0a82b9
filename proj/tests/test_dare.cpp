#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "yannrl/dare.hpp"
#include "yannrl/matrix.hpp"
#include "yannrl/rng.hpp"

using namespace yannrl;

namespace {

// Dynamic-programming oracle: run the closed loop under u = Kx and add up
// gamma^k (x'Qx + u'Ru). For the optimal K this must equal x0' P x0.
double simulated_cost(const Matrix& A, const Matrix& B, const Matrix& Q,
                      const Matrix& R, const Matrix& K, const Vec& x0,
                      double gamma, int steps) {
  Vec x = x0;
  double total = 0.0;
  double disc = 1.0;
  for (int k = 0; k < steps; ++k) {
    const Vec u = K * x;
    total += disc * (dot(x, Q * x) + dot(u, R * u));
    x = A * x + B * u;
    disc *= gamma;
  }
  return total;
}

}  // namespace

TEST_CASE("scalar fixed point is the golden ratio") {
  const Matrix one{{1.0}};
  const DareResult r = solve_dare(one, one, one, one);
  CHECK(r.P(0, 0) == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-10));
  CHECK(r.residual <= 1e-8);
}

TEST_CASE("value equals simulated closed-loop cost") {
  const Matrix A{{1.1, 0.2}, {-0.1, 0.9}};
  const Matrix B{{0.0}, {0.5}};
  const Matrix Q = Matrix::identity(2);
  const Matrix R{{0.1}};
  const DareResult r = solve_dare(A, B, Q, R);
  CHECK(r.residual <= 1e-8);

  const Matrix K = lqr_gain(A, B, R, r.P);
  const Matrix closed = A + B * K;
  CHECK(spectral_radius_estimate(closed) < 1.0);

  Rng rng(0xdd1u);
  for (int trial = 0; trial < 5; ++trial) {
    Vec x0 = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const double value = dot(x0, r.P * x0);
    const double cost = simulated_cost(A, B, Q, R, K, x0, 1.0, 2000);
    CHECK(std::fabs(value - cost) <= 1e-6 * std::max(1.0, std::fabs(value)));
  }
}

TEST_CASE("discount handled by scaling the dynamics") {
  const double gamma = 0.99;
  const Matrix A{{1.05, 0.1}, {0.0, 0.97}};
  const Matrix B{{0.1}, {0.3}};
  const Matrix Q = Matrix::diag({1.0, 2.0});
  const Matrix R{{0.5}};
  const double sg = std::sqrt(gamma);
  const DareResult r = solve_dare(sg * A, sg * B, Q, R);
  CHECK(r.residual <= 1e-8);
  const Matrix K = lqr_gain(sg * A, sg * B, R, r.P);

  Rng rng(0xdd2u);
  for (int trial = 0; trial < 5; ++trial) {
    Vec x0 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double value = dot(x0, r.P * x0);
    const double cost = simulated_cost(A, B, Q, R, K, x0, gamma, 4000);
    CHECK(std::fabs(value - cost) <= 1e-6 * std::max(1.0, std::fabs(value)));
  }
}

TEST_CASE("riccati residual of the returned matrix is tiny") {
  Rng rng(0xdd3u);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix A(3, 3), B(3, 1);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) A(i, j) = rng.uniform(-0.6, 0.6);
      B(i, 0) = rng.uniform(-1.0, 1.0);
    }
    A(0, 0) += 0.4;  // keep it interesting but convergent
    const Matrix Q = Matrix::identity(3);
    const Matrix R{{1.0}};
    const DareResult r = solve_dare(A, B, Q, R);
    CHECK(r.residual <= 1e-8);
    CHECK(dare_residual(A, B, Q, R, r.P) <= 1e-8);
    // symmetric by construction
    CHECK(max_abs_diff(r.P, r.P.transposed()) == 0.0);
  }
}
