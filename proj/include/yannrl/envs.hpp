#pragma once

#include <cstdint>

#include "yannrl/matrix.hpp"
#include "yannrl/mpc.hpp"

namespace yannrl {

// Inverted pendulum with torque input at the pivot:
//   theta'' = (3g/2l) sin(theta) + (3/(m l^2)) u
// theta is measured from upright, so (0, 0) is the unstable equilibrium.
// The defaults give theta'' = 15 sin(theta) + 3 u.
struct PendulumParams {
  double gravity = 10.0;
  double length = 1.0;
  double mass = 1.0;
  double dt = 0.05;
  double torque_limit = 2.0;  // |u| clipped before integration
  double speed_limit = 8.0;   // |omega| clipped after each step
  double angle_bound = 2.0;   // design-model state box, not a simulator clip
  int steps_per_episode = 200;
  double reset_span = 1.0;  // theta0, omega0 ~ U[-span, span]
};

// Exothermic CSTR with two reactions, A + B -> products (rate k1 C_A C_B)
// and solvent decomposition S -> products (rate k2 C_S), k_i Arrhenius in T.
// The manipulated variable is a deviation u of the jacket heat-transfer
// coefficient from its steady value; raising it cools the reactor. Time is
// measured in hours and one control period is 1/60 h.
//
// The published design matrices for this study (see
// make_linear_design(CstrParams)) are not derivable from any single
// parameterization of these balances; the plant here is a stand-in nonlinear
// system whose operating point, local stability pattern, and input
// sensitivity match the design model's structure. Inflow and operating-point
// values are configurable; the design matrices stay pinned regardless.
struct CstrParams {
  double volume = 4000.0;         // L
  double density = 36.0;          // mol/L
  double heat_capacity = 430.91;  // J/(mol K)
  double transfer_area = 5.3;     // m^2
  double coolant_temp = 373.0;    // K
  double dh1 = -45600.0;          // J/mol, reaction 1
  double dh2 = -320000.0;         // J/mol, reaction 2
  double arrhenius1 = 4e14;
  double arrhenius2 = 1e84;
  double activation1 = 1.28e5;  // J/mol
  double activation2 = 8e5;     // J/mol
  double gas_constant = 8.314;

  double flow = 640.0;     // L/h, matched in/out
  double feed_a = 8.0;     // mol/L in the inflow
  double feed_b = 12.0;
  double feed_s = 0.5;
  double feed_temp = 475.0;  // K
  double t_star = 475.0;     // operating temperature the regulator holds

  // Heat-transfer conductance per input unit, J/(h m^2 K). Calibrated so the
  // plant's input sensitivity at the operating point matches the design
  // model's input column.
  double u_unit = 4820.0;

  double u_limit = 55.0;       // |u| clipped before integration
  double safety_temp = 480.0;  // T above this is a safety violation
  double safety_penalty = 1e5;
  double dt = 1.0 / 60.0;  // h
  int steps_per_episode = 300;

  // Reset box in deviation coordinates (C_A, C_B, C_S, T), kept inside the
  // design-model state box and strictly below the safety limit.
  Vec reset_lo{-0.05, -1.0, -0.25, -30.0};
  Vec reset_hi{1.0, 1.0, 0.25, 3.0};

  bool disable_reactions = false;  // test hook: pure mixing dynamics
};

// Stationary point of the reactor balances at T = t_star, in closed form:
// concentrations from the species balances, then the steady heat-transfer
// coefficient from the energy balance.
struct CstrSteadyState {
  double c_a = 0.0, c_b = 0.0, c_s = 0.0, t = 0.0;
  double u_star = 0.0;  // steady heat-transfer coefficient, input units
};

CstrSteadyState solve_steady_state(const CstrParams& p);

// Time derivative of the absolute state (C_A, C_B, C_S, T) at input
// deviation u (clipping is the caller's job). Negative concentrations
// contribute zero reaction rate so dilution can pull them back.
Vec cstr_rhs(const CstrParams& p, const CstrSteadyState& ss, const Vec& state,
             double u);

// Analytic Jacobians of cstr_rhs at (state, u).
struct CstrJacobian {
  Matrix A;  // 4x4, d(rhs)/d(state)
  Matrix B;  // 4x1, d(rhs)/du
};
CstrJacobian cstr_jacobian(const CstrParams& p, const CstrSteadyState& ss,
                           const Vec& state, double u);

// One control period of the pendulum: clip u, RK4 at the full period, then
// clip omega and wrap theta to (-pi, pi].
Vec pendulum_step(const PendulumParams& p, const Vec& state, double u);

// One control period of the reactor: clip u, adaptive step-doubling RK4
// (the Arrhenius terms blow up fast above the safety band). Returns the new
// absolute state; sets *fault when the integrator cannot resolve the step.
Vec cstr_step(const CstrParams& p, const CstrSteadyState& ss, const Vec& state,
              double u, bool* fault);

// s' Qw s + u' R u in deviation coordinates.
double stage_cost(const Matrix& Qw, const Matrix& R, const Vec& s, const Vec& u);

struct EnvSpec {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  double dt = 0.0;
  Vec action_lo, action_hi;
  Matrix Qw, R;
  int steps_per_episode = 0;
  bool has_safety = false;
};

struct StepOutcome {
  Vec state;             // next deviation state
  double cost = 0.0;     // stage cost, penalty included
  bool violated = false; // safety predicate fired on the new state
  bool fault = false;    // integration blow-up; episode cannot continue
};

// Plants as value-like episodic simulators. States handed to and from the
// interface are deviation coordinates (what the controllers see).
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(std::uint64_t episode_seed) = 0;
  virtual StepOutcome step(const Vec& action) = 0;
  virtual Vec state() const = 0;
  // Places the plant at a chosen deviation state (evaluation rollouts).
  virtual void set_state(const Vec& deviation) = 0;
};

class PendulumEnv final : public Environment {
 public:
  explicit PendulumEnv(const PendulumParams& p = {});
  const EnvSpec& spec() const override { return spec_; }
  const PendulumParams& params() const { return params_; }
  Vec reset(std::uint64_t episode_seed) override;
  StepOutcome step(const Vec& action) override;
  Vec state() const override { return state_; }
  void set_state(const Vec& deviation) override;

 private:
  PendulumParams params_;
  EnvSpec spec_;
  Vec state_{0.0, 0.0};
};

class CstrEnv final : public Environment {
 public:
  explicit CstrEnv(const CstrParams& p = {});
  const EnvSpec& spec() const override { return spec_; }
  const CstrParams& params() const { return params_; }
  const CstrSteadyState& steady_state() const { return ss_; }
  Vec reset(std::uint64_t episode_seed) override;
  StepOutcome step(const Vec& action) override;
  Vec state() const override;  // deviation from the steady state
  void set_state(const Vec& deviation) override;

 private:
  CstrParams params_;
  CstrSteadyState ss_;
  EnvSpec spec_;
  Vec abs_state_{0.0, 0.0, 0.0, 0.0};
};

// Linear regulator designs the offline pipeline consumes.
//
// The pendulum path differentiates the simulator dynamics at upright and
// holds the result to pinned 4-decimal reference values (hard error on
// mismatch: it guards the whole derivation pipeline). The reactor path
// returns fixed design constants: the controllers are designed against this
// model, the nonlinear plant above stands in for the true process.
MpcDesign make_linear_design(const PendulumParams& p);
MpcDesign make_linear_design(const CstrParams& p);

}  // namespace yannrl
