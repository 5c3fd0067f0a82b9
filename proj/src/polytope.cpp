#include "yannrl/polytope.hpp"

#include <algorithm>
#include <cmath>

namespace yannrl {

bool Polytope::contains(const Vec& x, double tol) const {
  require(x.size() == dim(), "Polytope::contains: dimension mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) v += F(i, j) * x[j];
    if (v - g[i] > tol * std::max(1.0, std::fabs(g[i]))) return false;
  }
  return true;
}

double Polytope::max_violation(const Vec& x) const {
  require(x.size() == dim(), "Polytope::max_violation: dimension mismatch");
  double worst = -HUGE_VAL;
  for (std::size_t i = 0; i < size(); ++i) {
    double v = -g[i];
    for (std::size_t j = 0; j < dim(); ++j) v += F(i, j) * x[j];
    worst = std::max(worst, v);
  }
  return worst;
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  require(lo.size() == hi.size(), "Polytope::box: bound sizes differ");
  const std::size_t n = lo.size();
  Matrix F(2 * n, n);
  Vec g(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    require(lo[i] <= hi[i], "Polytope::box: lo > hi");
    F(2 * i, i) = 1.0;
    g[2 * i] = hi[i];
    F(2 * i + 1, i) = -1.0;
    g[2 * i + 1] = -lo[i];
  }
  return Polytope(std::move(F), std::move(g));
}

Polytope Polytope::appended(const Polytope& other) const {
  if (size() == 0) return other;
  if (other.size() == 0) return *this;
  require(dim() == other.dim(), "Polytope::appended: dimension mismatch");
  Polytope r;
  r.F = vstack(F, other.F);
  r.g = g;
  r.g.insert(r.g.end(), other.g.begin(), other.g.end());
  return r;
}

Polytope Polytope::normalized() const {
  Polytope r = *this;
  for (std::size_t i = 0; i < size(); ++i) {
    double nrm = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) nrm += F(i, j) * F(i, j);
    nrm = std::sqrt(nrm);
    if (nrm > 0.0) {
      for (std::size_t j = 0; j < dim(); ++j) r.F(i, j) = F(i, j) / nrm;
      r.g[i] = g[i] / nrm;
    }
  }
  return r;
}

}  // namespace yannrl
