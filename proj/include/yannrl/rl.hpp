#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "yannrl/envs.hpp"
#include "yannrl/net.hpp"
#include "yannrl/rng.hpp"

namespace yannrl {

struct Transition {
  Vec s, u;
  double cost = 0.0;
  Vec s_next;
  // True when the episode was cut by the safety predicate (or a fault): the
  // target then stops at the immediate cost. Time-limit truncation stores
  // false and keeps bootstrapping.
  bool terminal = false;
};

// Fixed-capacity ring. Batches are drawn uniformly without replacement
// within a batch via a partial shuffle of the live index range.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed);
  void push(Transition t);
  std::size_t size() const { return store_.size(); }
  const Transition& at(std::size_t i) const { return store_[i]; }
  std::vector<Transition> sample(std::size_t batch);

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> store_;
  Rng rng_;
};

// Per-parameter moment estimates for every affine layer of one network.
// Frozen entries (mask 0) are skipped entirely: no update, no moments.
struct AdamState {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t t = 0;
  std::vector<Matrix> mw, vw;
  std::vector<Vec> mb, vb;
};

AdamState make_adam(const LayeredNetwork& net);

// One Adam step over the mask-trainable parameters. Throws NumericError on
// a non-finite gradient entry at a trainable position.
void adam_step(LayeredNetwork& net, const std::vector<LayerGrad>& grads,
               AdamState& state, double lr);

// theta_target <- tau theta + (1 - tau) theta_target, every parameter
// (frozen ones included, which stay equal anyway).
void polyak(LayeredNetwork& target, const LayeredNetwork& online, double tau);

struct AgentConfig {
  double gamma = 0.99;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  double tau_actor = 0.005;
  double tau_critic = 0.005;
  std::size_t batch = 64;
  std::size_t buffer_capacity = 1000000;
  double noise_sigma = 0.1;  // exploration scale as a fraction of the range
  std::uint64_t seed = 1;
};

// Actor/critic pair with target copies and optimizer state. The state box
// clamps the actor's input (rollouts can leave the offline domain, where
// every gate is closed and the network yields 0); the action box saturates
// what is sent to the plant.
struct Agent {
  LayeredNetwork actor, critic, target_actor, target_critic;
  AdamState actor_opt, critic_opt;
  AgentConfig cfg;
  Vec state_lo, state_hi;
  Vec action_lo, action_hi;
  bool stochastic = false;  // adds Gaussian exploration noise in training
  Rng noise{0};
};

Agent make_agent(const LayeredNetwork& actor, const LayeredNetwork& critic,
                 const AgentConfig& cfg, const Vec& state_lo, const Vec& state_hi,
                 const Vec& action_lo, const Vec& action_hi, bool stochastic);

// Deterministic policy: clamp the state, run the actor, saturate the action.
// explore=true additionally perturbs stochastic agents before saturating.
Vec act(Agent& agent, const Vec& s, bool explore);

// Temporal-difference targets y = c + gamma * Q_target(s', pi_target(s'))
// (y = c on terminal transitions), then one Adam step on the squared error.
// Returns the pre-update mean squared error.
double critic_update(Agent& agent, const std::vector<Transition>& batch);

struct ActorUpdate {
  double mean_q = 0.0;    // pre-update objective
  double grad_norm = 0.0; // l2 over trainable actor parameters
};

// Differentiates mean_i Q(s_i, pi(s_i)) through the critic's action input
// and steps the actor to DECREASE it (Q accumulates cost, not reward).
// Returns the pre-update objective and gradient norm.
ActorUpdate actor_update(Agent& agent, const std::vector<Transition>& batch);

struct EpisodeStats {
  int episode = 0;
  double total_cost = 0.0;
  int violations = 0;
  double mean_critic_loss = 0.0;  // over this episode's updates, 0 if none
  double mean_q = 0.0;
  int steps = 0;
  bool fault = false;
};

struct TrainingLog {
  std::vector<EpisodeStats> episodes;
};

// Algorithm: per step act (with exploration for stochastic agents), step the
// plant, store the transition, then one critic and one actor update plus
// Polyak tracking once the buffer holds a full batch. Episodes end at the
// step limit or at a safety cut. Deterministic given the agent seed; the
// callback (checkpointing, progress lines) sees each finished episode and
// must not touch the agent.
using EpisodeCallback = std::function<void(const EpisodeStats&, const Agent&)>;
TrainingLog train(Environment& env, Agent& agent, int episodes,
                  const EpisodeCallback& on_episode = {});

struct EvalEpisode {
  double total_cost = 0.0;
  int violations = 0;
  int steps = 0;
};

// Noise-free, learning-free rollouts from the fixed episode seeds.
std::vector<EvalEpisode> evaluate(Environment& env, Agent& agent,
                                  const std::vector<std::uint64_t>& seeds);

// Baseline networks: dense two-hidden-layer MLPs, relu inside. The actor
// ends in tanh scaled to the action bound; the critic maps (s, u) to one
// value. Hidden affines use fan-in uniform init, the output affine a small
// uniform so early estimates stay near zero.
LayeredNetwork make_mlp_actor(std::size_t n, std::size_t m, const Vec& action_hi,
                              std::size_t hidden, std::uint64_t seed);
LayeredNetwork make_mlp_critic(std::size_t n, std::size_t m, std::size_t hidden,
                               std::uint64_t seed);

}  // namespace yannrl
