#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "yannrl/discretize.hpp"

using namespace yannrl;

TEST_CASE("matrix exponential of known matrices") {
  CHECK(max_abs_diff(expm(Matrix(2, 2, 0.0)), Matrix::identity(2)) == 0.0);

  const Matrix D = Matrix::diag({1.0, -2.0});
  const Matrix eD = expm(D);
  CHECK(eD(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(eD(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  CHECK(std::fabs(eD(0, 1)) <= 1e-15);

  // nilpotent: series terminates exactly
  const Matrix N{{0.0, 1.0}, {0.0, 0.0}};
  const Matrix eN = expm(N);
  CHECK(eN(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eN(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eN(1, 0) == 0.0);

  // rotation generator: exp is the rotation matrix, angle 2 forces scaling
  const double th = 2.0;
  const Matrix Rg{{0.0, -th}, {th, 0.0}};
  const Matrix eR = expm(Rg);
  CHECK(eR(0, 0) == doctest::Approx(std::cos(th)).epsilon(1e-12));
  CHECK(eR(0, 1) == doctest::Approx(-std::sin(th)).epsilon(1e-12));
  CHECK(eR(1, 0) == doctest::Approx(std::sin(th)).epsilon(1e-12));

  // exp(A) exp(-A) = I
  const Matrix A{{0.3, 1.2}, {-0.7, 0.4}};
  CHECK(max_abs_diff(expm(A) * expm(A * -1.0), Matrix::identity(2)) <= 1e-13);
}

TEST_CASE("double integrator discretizes to the textbook result") {
  const Matrix Ac{{0.0, 1.0}, {0.0, 0.0}};
  const Matrix Bc{{0.0}, {1.0}};
  const double dt = 0.1;
  const DiscreteSystem d = zoh_discretize(Ac, Bc, dt);
  CHECK(d.A(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.A(0, 1) == doctest::Approx(dt).epsilon(1e-14));
  CHECK(d.A(1, 0) == 0.0);
  CHECK(d.A(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.B(0, 0) == doctest::Approx(0.5 * dt * dt).epsilon(1e-13));
  CHECK(d.B(1, 0) == doctest::Approx(dt).epsilon(1e-13));
}

TEST_CASE("unstable second-order plant matches the closed form") {
  // d/dt (x, v) = (v, w2 x + b u): hyperbolic rotation with rate sqrt(w2)
  const double w2 = 15.0;
  const double b = 3.0;
  const double dt = 0.05;
  const Matrix Ac{{0.0, 1.0}, {w2, 0.0}};
  const Matrix Bc{{0.0}, {b}};
  const DiscreteSystem d = zoh_discretize(Ac, Bc, dt);

  const double w = std::sqrt(w2);
  const double ch = std::cosh(w * dt);
  const double sh = std::sinh(w * dt);
  CHECK(d.A(0, 0) == doctest::Approx(ch).epsilon(1e-12));
  CHECK(d.A(0, 1) == doctest::Approx(sh / w).epsilon(1e-12));
  CHECK(d.A(1, 0) == doctest::Approx(w * sh).epsilon(1e-12));
  CHECK(d.A(1, 1) == doctest::Approx(ch).epsilon(1e-12));
  CHECK(d.B(0, 0) == doctest::Approx(b * (ch - 1.0) / w2).epsilon(1e-12));
  CHECK(d.B(1, 0) == doctest::Approx(b * sh / w).epsilon(1e-12));
}
