#include "yannrl/linearize.hpp"

#include <cmath>

namespace yannrl {

namespace {

Matrix central_diff(const std::function<Vec(const Vec&)>& f, const Vec& z0,
                    std::size_t n_out, double rel_step) {
  Matrix J(n_out, z0.size());
  Vec z = z0;
  for (std::size_t j = 0; j < z0.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::fabs(z0[j]));
    z[j] = z0[j] + h;
    const Vec fp = f(z);
    z[j] = z0[j] - h;
    const Vec fm = f(z);
    z[j] = z0[j];
    require(fp.size() == n_out && fm.size() == n_out,
            "jacobian_linearize: inconsistent output size");
    for (std::size_t i = 0; i < n_out; ++i) {
      if (!std::isfinite(fp[i]) || !std::isfinite(fm[i]))
        throw NumericError("jacobian_linearize: non-finite dynamics evaluation");
      J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
  }
  return J;
}

}  // namespace

Jacobians jacobian_linearize(const VectorField& f, const Vec& x0, const Vec& u0,
                             double rel_step) {
  const std::size_t n = x0.size();
  Jacobians out;
  out.A = central_diff([&](const Vec& x) { return f(x, u0); }, x0, n, rel_step);
  out.B = central_diff([&](const Vec& u) { return f(x0, u); }, u0, n, rel_step);
  return out;
}

}  // namespace yannrl
