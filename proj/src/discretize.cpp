#include "yannrl/discretize.hpp"

#include <cmath>

namespace yannrl {

Matrix expm(const Matrix& M) {
  require(M.rows() == M.cols(), "expm: square matrix required");
  require(M.all_finite(), "expm: non-finite entries");
  const std::size_t n = M.rows();

  int s = 0;
  double nrm = norm_inf(M);
  while (nrm > 0.125) {
    nrm *= 0.5;
    ++s;
  }
  Matrix X = M * std::ldexp(1.0, -s);

  // Taylor sum, term_k = X^k / k!. With ||X|| <= 1/8 the terms decay faster
  // than 8^-k, so 30 terms reach machine precision with margin.
  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = term * X;
    term *= 1.0 / k;
    sum += term;
    if (max_abs(term) < 1e-18 * std::max(1.0, max_abs(sum))) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

DiscreteSystem zoh_discretize(const Matrix& Ac, const Matrix& Bc, double dt) {
  const std::size_t n = Ac.rows();
  const std::size_t m = Bc.cols();
  require(Ac.cols() == n, "zoh_discretize: Ac must be square");
  require(Bc.rows() == n, "zoh_discretize: Bc row count must match Ac");
  require(dt > 0.0 && std::isfinite(dt), "zoh_discretize: dt must be positive");

  Matrix aug(n + m, n + m);
  aug.set_block(0, 0, Ac * dt);
  aug.set_block(0, n, Bc * dt);
  const Matrix e = expm(aug);
  return DiscreteSystem{e.block(0, 0, n, n), e.block(0, n, n, m)};
}

}  // namespace yannrl
