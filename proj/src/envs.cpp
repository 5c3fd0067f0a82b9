#include "yannrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "yannrl/dare.hpp"
#include "yannrl/discretize.hpp"
#include "yannrl/errors.hpp"
#include "yannrl/linearize.hpp"
#include "yannrl/rng.hpp"

namespace yannrl {
namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Classical RK4 stage sweep for a small fixed-size state.
template <typename Rhs>
Vec rk4_step(const Rhs& f, const Vec& y, double h) {
  const Vec k1 = f(y);
  Vec y2(y);
  for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * h * k1[i];
  const Vec k2 = f(y2);
  for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + 0.5 * h * k2[i];
  const Vec k3 = f(y2);
  for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] + h * k3[i];
  const Vec k4 = f(y2);
  Vec out(y);
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Step-doubling error control: a full step against two half steps. Keeps the
// two-half result. Gives up (fault) once the substep underflows the budget,
// which in practice means a thermal runaway took the state out of the
// region where the balances mean anything.
template <typename Rhs>
bool rk4_adaptive(const Rhs& f, Vec& y, double dt, double tol) {
  const double h_min = dt / 1048576.0;
  double h = dt;
  double t = 0.0;
  while (t < dt) {
    h = std::min(h, dt - t);
    const Vec full = rk4_step(f, y, h);
    Vec half = rk4_step(f, y, 0.5 * h);
    half = rk4_step(f, half, 0.5 * h);
    double err = 0.0;
    bool finite = all_finite(full) && all_finite(half);
    if (finite) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double scale = std::max(1.0, std::abs(y[i]));
        err = std::max(err, std::abs(full[i] - half[i]) / scale);
      }
    }
    if (!finite || err > tol) {
      h *= 0.5;
      if (h < h_min) return false;
      continue;
    }
    y = half;
    t += h;
    if (err < tol / 32.0) h *= 2.0;
  }
  return true;
}

struct CstrRates {
  double k1 = 0.0, k2 = 0.0;
};

// Rates are frozen below 1 K: a diverging integration attempt can sample
// nonphysical temperatures, and exp(-E/(R*T)) with T < 0 overflows before
// the step-doubling check gets a chance to reject the step.
CstrRates arrhenius(const CstrParams& p, double temp) {
  CstrRates r;
  if (p.disable_reactions || temp < 1.0) return r;
  r.k1 = p.arrhenius1 * std::exp(-p.activation1 / (p.gas_constant * temp));
  r.k2 = p.arrhenius2 * std::exp(-p.activation2 / (p.gas_constant * temp));
  return r;
}

}  // namespace

double stage_cost(const Matrix& Qw, const Matrix& R, const Vec& s, const Vec& u) {
  require(Qw.rows() == s.size() && R.rows() == u.size(), "stage_cost: size mismatch");
  double c = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) c += s[i] * Qw(i, j) * s[j];
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) c += u[i] * R(i, j) * u[j];
  return c;
}

Vec pendulum_step(const PendulumParams& p, const Vec& state, double u) {
  require(state.size() == 2, "pendulum_step: state is (theta, omega)");
  const double uc = clamp(u, -p.torque_limit, p.torque_limit);
  const double grav = 1.5 * p.gravity / p.length;
  const double gain = 3.0 / (p.mass * p.length * p.length);
  const auto rhs = [&](const Vec& y) {
    return Vec{y[1], grav * std::sin(y[0]) + gain * uc};
  };
  Vec next = rk4_step(rhs, state, p.dt);
  next[1] = clamp(next[1], -p.speed_limit, p.speed_limit);
  next[0] = std::remainder(next[0], 2.0 * kPi);
  return next;
}

CstrSteadyState solve_steady_state(const CstrParams& p) {
  require(p.t_star > p.coolant_temp, "reactor: operating point must sit above the coolant");
  require(p.flow > 0.0 && p.volume > 0.0, "reactor: need positive flow and volume");
  const CstrRates k = arrhenius(p, p.t_star);
  const double qv = p.flow / p.volume;
  CstrSteadyState ss;
  ss.t = p.t_star;
  if (k.k1 <= 0.0) {
    ss.c_a = p.feed_a;
    ss.c_b = p.feed_b;
  } else {
    // Species balances force equal consumption of A and B, so the feed
    // excess survives: c_b = c_a + (feed_b - feed_a), and c_a solves
    // k1 c^2 + (qv + k1 excess) c - qv feed_a = 0.
    const double excess = p.feed_b - p.feed_a;
    const double lin = qv + k.k1 * excess;
    const double disc = lin * lin + 4.0 * k.k1 * qv * p.feed_a;
    ss.c_a = (-lin + std::sqrt(disc)) / (2.0 * k.k1);
    ss.c_b = ss.c_a + excess;
  }
  ss.c_s = qv * p.feed_s / (qv + k.k2);
  const double r1 = k.k1 * ss.c_a * ss.c_b;
  const double r2 = k.k2 * ss.c_s;
  const double rho_cp = p.density * p.heat_capacity;
  const double heat = (-p.dh1 * r1 - p.dh2 * r2) / rho_cp;
  const double cool_per_unit =
      p.u_unit * p.transfer_area * (p.t_star - p.coolant_temp) / (p.volume * rho_cp);
  ss.u_star = (qv * (p.feed_temp - p.t_star) + heat) / cool_per_unit;
  return ss;
}

Vec cstr_rhs(const CstrParams& p, const CstrSteadyState& ss, const Vec& state,
             double u) {
  require(state.size() == 4, "cstr_rhs: state is (C_A, C_B, C_S, T)");
  const double temp = state[3];
  const CstrRates k = arrhenius(p, temp);
  const double ca = std::max(state[0], 0.0);
  const double cb = std::max(state[1], 0.0);
  const double cs = std::max(state[2], 0.0);
  const double r1 = k.k1 * ca * cb;
  const double r2 = k.k2 * cs;
  const double qv = p.flow / p.volume;
  const double rho_cp = p.density * p.heat_capacity;
  const double transfer = (ss.u_star + u) * p.u_unit * p.transfer_area *
                          (temp - p.coolant_temp) / p.volume;
  return Vec{qv * (p.feed_a - state[0]) - r1,
             qv * (p.feed_b - state[1]) - r1,
             qv * (p.feed_s - state[2]) - r2,
             qv * (p.feed_temp - temp) + (-p.dh1 * r1 - p.dh2 * r2 - transfer) / rho_cp};
}

CstrJacobian cstr_jacobian(const CstrParams& p, const CstrSteadyState& ss,
                           const Vec& state, double u) {
  require(state.size() == 4, "cstr_jacobian: state is (C_A, C_B, C_S, T)");
  const double temp = state[3];
  const CstrRates k = arrhenius(p, temp);
  const double ca = std::max(state[0], 0.0);
  const double cb = std::max(state[1], 0.0);
  const double cs = std::max(state[2], 0.0);
  const double qv = p.flow / p.volume;
  const double rho_cp = p.density * p.heat_capacity;
  // d k_i / dT = k_i E_i / (R T^2)
  const double rt2 = p.gas_constant * temp * temp;
  const double dk1 = temp < 1.0 ? 0.0 : k.k1 * p.activation1 / rt2;
  const double dk2 = temp < 1.0 ? 0.0 : k.k2 * p.activation2 / rt2;
  CstrJacobian j;
  j.A = Matrix(4, 4);
  j.B = Matrix(4, 1);
  j.A(0, 0) = -qv - k.k1 * cb;
  j.A(0, 1) = -k.k1 * ca;
  j.A(0, 3) = -dk1 * ca * cb;
  j.A(1, 0) = -k.k1 * cb;
  j.A(1, 1) = -qv - k.k1 * ca;
  j.A(1, 3) = -dk1 * ca * cb;
  j.A(2, 2) = -qv - k.k2;
  j.A(2, 3) = -dk2 * cs;
  const double cool_per_unit = p.u_unit * p.transfer_area / (p.volume * rho_cp);
  j.A(3, 0) = -p.dh1 * k.k1 * cb / rho_cp;
  j.A(3, 1) = -p.dh1 * k.k1 * ca / rho_cp;
  j.A(3, 2) = -p.dh2 * k.k2 / rho_cp;
  j.A(3, 3) = -qv + (-p.dh1 * dk1 * ca * cb - p.dh2 * dk2 * cs) / rho_cp -
              (ss.u_star + u) * cool_per_unit;
  j.B(3, 0) = -cool_per_unit * (temp - p.coolant_temp);
  return j;
}

Vec cstr_step(const CstrParams& p, const CstrSteadyState& ss, const Vec& state,
              double u, bool* fault) {
  const double uc = clamp(u, -p.u_limit, p.u_limit);
  const auto rhs = [&](const Vec& y) { return cstr_rhs(p, ss, y, uc); };
  Vec y(state);
  const bool ok = rk4_adaptive(rhs, y, p.dt, 1e-9);
  if (fault) *fault = !ok;
  if (!ok) return state;
  for (int i = 0; i < 3; ++i) y[i] = std::max(y[i], 0.0);
  return y;
}

PendulumEnv::PendulumEnv(const PendulumParams& p) : params_(p) {
  spec_.state_dim = 2;
  spec_.action_dim = 1;
  spec_.dt = p.dt;
  spec_.action_lo = {-p.torque_limit};
  spec_.action_hi = {p.torque_limit};
  spec_.Qw = Matrix::identity(2);
  spec_.R = Matrix{{0.001}};
  spec_.steps_per_episode = p.steps_per_episode;
  spec_.has_safety = false;
}

Vec PendulumEnv::reset(std::uint64_t episode_seed) {
  Rng rng(episode_seed);
  state_ = {rng.uniform(-params_.reset_span, params_.reset_span),
            rng.uniform(-params_.reset_span, params_.reset_span)};
  return state_;
}

void PendulumEnv::set_state(const Vec& deviation) {
  require(deviation.size() == 2, "pendulum: state is (theta, omega)");
  state_ = deviation;
}

StepOutcome PendulumEnv::step(const Vec& action) {
  require(action.size() == 1, "pendulum: scalar action");
  const double uc = clamp(action[0], -params_.torque_limit, params_.torque_limit);
  StepOutcome out;
  out.cost = stage_cost(spec_.Qw, spec_.R, state_, {uc});
  state_ = pendulum_step(params_, state_, uc);
  out.state = state_;
  return out;
}

CstrEnv::CstrEnv(const CstrParams& p) : params_(p), ss_(solve_steady_state(p)) {
  require(p.reset_lo.size() == 4 && p.reset_hi.size() == 4,
          "reactor: reset box is over (C_A, C_B, C_S, T) deviations");
  spec_.state_dim = 4;
  spec_.action_dim = 1;
  spec_.dt = p.dt;
  spec_.action_lo = {-p.u_limit};
  spec_.action_hi = {p.u_limit};
  spec_.Qw = 0.1 * Matrix::identity(4);
  spec_.R = Matrix{{0.0001}};
  spec_.steps_per_episode = p.steps_per_episode;
  spec_.has_safety = true;
  abs_state_ = {ss_.c_a, ss_.c_b, ss_.c_s, ss_.t};
}

Vec CstrEnv::state() const {
  return Vec{abs_state_[0] - ss_.c_a, abs_state_[1] - ss_.c_b,
             abs_state_[2] - ss_.c_s, abs_state_[3] - ss_.t};
}

Vec CstrEnv::reset(std::uint64_t episode_seed) {
  Rng rng(episode_seed);
  const Vec base{ss_.c_a, ss_.c_b, ss_.c_s, ss_.t};
  for (int i = 0; i < 4; ++i) {
    require(params_.reset_lo[i] <= params_.reset_hi[i], "reactor: reset box inverted");
    abs_state_[i] = base[i] + rng.uniform(params_.reset_lo[i], params_.reset_hi[i]);
  }
  return state();
}

void CstrEnv::set_state(const Vec& deviation) {
  require(deviation.size() == 4, "reactor: state is (C_A, C_B, C_S, T)");
  abs_state_ = {ss_.c_a + deviation[0], ss_.c_b + deviation[1],
                ss_.c_s + deviation[2], ss_.t + deviation[3]};
}

StepOutcome CstrEnv::step(const Vec& action) {
  require(action.size() == 1, "reactor: scalar action");
  const double uc = clamp(action[0], -params_.u_limit, params_.u_limit);
  StepOutcome out;
  out.cost = stage_cost(spec_.Qw, spec_.R, state(), {uc});
  bool fault = false;
  abs_state_ = cstr_step(params_, ss_, abs_state_, uc, &fault);
  out.state = state();
  out.fault = fault;
  // An unresolvable step is a runaway in practice: same treatment as a
  // measured violation, so the episode ends and the penalty lands.
  out.violated = fault || abs_state_[3] > params_.safety_temp;
  if (out.violated) out.cost += params_.safety_penalty;
  return out;
}

MpcDesign make_linear_design(const PendulumParams& p) {
  const double grav = 1.5 * p.gravity / p.length;
  const double gain = 3.0 / (p.mass * p.length * p.length);
  const VectorField f = [grav, gain](const Vec& x, const Vec& u) {
    return Vec{x[1], grav * std::sin(x[0]) + gain * u[0]};
  };
  const Jacobians jac = jacobian_linearize(f, {0.0, 0.0}, {0.0});
  const DiscreteSystem sys = zoh_discretize(jac.A, jac.B, p.dt);

  // Reference values for the default configuration, pinned to 4 decimals.
  // A drift here means the differentiation or discretization pipeline broke,
  // so it is a hard error rather than a report.
  const bool reference_config = p.gravity == 10.0 && p.length == 1.0 &&
                                p.mass == 1.0 && p.dt == 0.05;
  if (reference_config) {
    const Matrix a_ref{{1.0188, 0.0503}, {0.7547, 1.0188}};
    const Matrix b_ref{{0.0038}, {0.1509}};
    if (max_abs_diff(sys.A, a_ref) > 5e-5 || max_abs_diff(sys.B, b_ref) > 5e-5) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "pendulum design drifted from its reference linearization "
                    "(dA=%.2e dB=%.2e)",
                    max_abs_diff(sys.A, a_ref), max_abs_diff(sys.B, b_ref));
      throw NumericError(msg);
    }
  }

  MpcDesign d;
  d.A = sys.A;
  d.B = sys.B;
  d.Qw = Matrix::identity(2);
  d.R = Matrix{{0.001}};
  d.P = solve_dare(d.A, d.B, d.Qw, d.R).P;
  d.horizon = 2;
  d.state_set = Polytope::box({-p.angle_bound, -p.speed_limit},
                              {p.angle_bound, p.speed_limit});
  d.input_set = Polytope::box({-p.torque_limit}, {p.torque_limit});
  return d;
}

MpcDesign make_linear_design(const CstrParams& p) {
  // Fixed design constants for the reactor study. The simulator's own
  // linearization lands close in structure (see the tests) but the control
  // design is pinned to these values; the nonlinear plant stands in for the
  // true process. The +5 K ceiling is the safety margin above the operating
  // temperature.
  MpcDesign d;
  d.A = Matrix{{0.9506, 0.0, 0.0, 0.0},
               {-0.0484, 0.9943, 0.0, 0.0},
               {0.0, 0.0, 0.9909, 0.0},
               {0.6970, 0.0678, 0.0, 1.0030}};
  d.B = Matrix{{0.0}, {0.0}, {0.0}, {-0.0007}};
  d.Qw = 0.1 * Matrix::identity(4);
  d.R = Matrix{{0.0001}};
  d.P = solve_dare(d.A, d.B, d.Qw, d.R).P;
  d.horizon = 2;
  d.state_set = Polytope::box({-2.0, -2.0, -2.0, -70.0}, {2.0, 2.0, 2.0, 5.0});
  d.input_set = Polytope::box({-p.u_limit}, {p.u_limit});
  return d;
}

}  // namespace yannrl
