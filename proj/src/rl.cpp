#include "yannrl/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "yannrl/errors.hpp"

namespace yannrl {

namespace {

Vec clamp_box(const Vec& x, const Vec& lo, const Vec& hi) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  }
  return out;
}

Vec joined(const Vec& a, const Vec& b) {
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<LayerGrad> zero_grads(const LayeredNetwork& net) {
  std::vector<LayerGrad> gs(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    gs[i].dW = Matrix(net.layers[i].W.rows(), net.layers[i].W.cols());
    gs[i].db = Vec(net.layers[i].b.size(), 0.0);
  }
  return gs;
}

void accumulate(std::vector<LayerGrad>& acc, const std::vector<LayerGrad>& g) {
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (!g[i].dW.empty()) acc[i].dW += g[i].dW;
    for (std::size_t j = 0; j < g[i].db.size(); ++j) acc[i].db[j] += g[i].db[j];
  }
}

// The frozen copies act through the same clamp/saturate wrapper as act(),
// minus the exploration noise.
Vec target_action(const Agent& a, const Vec& s) {
  const Vec u = a.target_actor.forward(clamp_box(s, a.state_lo, a.state_hi));
  return clamp_box(u, a.action_lo, a.action_hi);
}

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double lim, Rng& rng) {
  Matrix W(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) W(i, j) = rng.uniform(-lim, lim);
  }
  return W;
}

Vec uniform_vec(std::size_t n, double lim, Rng& rng) {
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform(-lim, lim);
  return v;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
  require(capacity >= 1, "replay capacity must be at least 1");
}

void ReplayBuffer::push(Transition t) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(t));
  } else {
    store_[next_ % capacity_] = std::move(t);
  }
  ++next_;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch) {
  require(batch >= 1, "sample: batch must be at least 1");
  require(batch <= store_.size(), "sample: batch exceeds buffer size");
  // Partial Fisher-Yates: uniform without replacement within the batch.
  std::vector<std::size_t> idx(store_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<Transition> out;
  out.reserve(batch);
  for (std::size_t k = 0; k < batch; ++k) {
    std::swap(idx[k], idx[k + rng_.below(idx.size() - k)]);
    out.push_back(store_[idx[k]]);
  }
  return out;
}

AdamState make_adam(const LayeredNetwork& net) {
  AdamState st;
  st.mw.reserve(net.layers.size());
  st.vw.reserve(net.layers.size());
  st.mb.reserve(net.layers.size());
  st.vb.reserve(net.layers.size());
  for (const Layer& l : net.layers) {
    st.mw.emplace_back(l.W.rows(), l.W.cols());
    st.vw.emplace_back(l.W.rows(), l.W.cols());
    st.mb.emplace_back(l.b.size(), 0.0);
    st.vb.emplace_back(l.b.size(), 0.0);
  }
  return st;
}

void adam_step(LayeredNetwork& net, const std::vector<LayerGrad>& grads,
               AdamState& state, double lr) {
  require(grads.size() == net.layers.size(), "adam_step: gradient count mismatch");
  require(state.mw.size() == net.layers.size(), "adam_step: state does not match network");
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    Layer& l = net.layers[li];
    if (l.kind != LayerKind::Affine) continue;
    for (std::size_t i = 0; i < l.W.rows(); ++i) {
      for (std::size_t j = 0; j < l.W.cols(); ++j) {
        if (l.w_mask(i, j) == 0.0) continue;
        const double g = grads[li].dW(i, j);
        if (!std::isfinite(g)) throw NumericError("adam_step: non-finite weight gradient");
        double& m = state.mw[li](i, j);
        double& v = state.vw[li](i, j);
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        l.W(i, j) -= lr * (m / c1) / (std::sqrt(v / c2) + state.eps);
      }
    }
    if (!l.has_bias) continue;
    for (std::size_t i = 0; i < l.b.size(); ++i) {
      if (l.b_mask[i] == 0.0) continue;
      const double g = grads[li].db[i];
      if (!std::isfinite(g)) throw NumericError("adam_step: non-finite bias gradient");
      double& m = state.mb[li][i];
      double& v = state.vb[li][i];
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v = state.beta2 * v + (1.0 - state.beta2) * g * g;
      l.b[i] -= lr * (m / c1) / (std::sqrt(v / c2) + state.eps);
    }
  }
}

void polyak(LayeredNetwork& target, const LayeredNetwork& online, double tau) {
  require(tau >= 0.0 && tau <= 1.0, "polyak: tau must lie in [0, 1]");
  require(target.layers.size() == online.layers.size(), "polyak: topology mismatch");
  for (std::size_t li = 0; li < target.layers.size(); ++li) {
    Layer& t = target.layers[li];
    const Layer& o = online.layers[li];
    require(t.kind == o.kind && t.W.rows() == o.W.rows() && t.W.cols() == o.W.cols() &&
                t.b.size() == o.b.size(),
            "polyak: topology mismatch");
    for (std::size_t i = 0; i < t.W.rows(); ++i) {
      for (std::size_t j = 0; j < t.W.cols(); ++j) {
        t.W(i, j) = tau * o.W(i, j) + (1.0 - tau) * t.W(i, j);
      }
    }
    for (std::size_t i = 0; i < t.b.size(); ++i) {
      t.b[i] = tau * o.b[i] + (1.0 - tau) * t.b[i];
    }
  }
}

Agent make_agent(const LayeredNetwork& actor, const LayeredNetwork& critic,
                 const AgentConfig& cfg, const Vec& state_lo, const Vec& state_hi,
                 const Vec& action_lo, const Vec& action_hi, bool stochastic) {
  require(cfg.gamma > 0.0 && cfg.gamma <= 1.0, "make_agent: gamma must lie in (0, 1]");
  require(cfg.tau_actor > 0.0 && cfg.tau_actor <= 1.0, "make_agent: tau_actor must lie in (0, 1]");
  require(cfg.tau_critic > 0.0 && cfg.tau_critic <= 1.0,
          "make_agent: tau_critic must lie in (0, 1]");
  require(cfg.batch >= 1, "make_agent: batch must be at least 1");
  require(cfg.noise_sigma >= 0.0, "make_agent: noise_sigma must be nonnegative");
  require(state_lo.size() == state_hi.size(), "make_agent: state bound sizes differ");
  require(action_lo.size() == action_hi.size(), "make_agent: action bound sizes differ");
  require(actor.input_dim == state_lo.size(), "make_agent: actor input is not the state");
  require(actor.output_dim == action_lo.size(), "make_agent: actor output is not the action");
  require(critic.input_dim == state_lo.size() + action_lo.size(),
          "make_agent: critic input is not (state, action)");
  require(critic.output_dim == 1, "make_agent: critic must produce one value");
  for (std::size_t i = 0; i < state_lo.size(); ++i) {
    require(state_lo[i] <= state_hi[i], "make_agent: empty state box");
  }
  for (std::size_t i = 0; i < action_lo.size(); ++i) {
    require(action_lo[i] <= action_hi[i], "make_agent: empty action box");
  }

  Agent a;
  a.actor = actor;
  a.critic = critic;
  a.target_actor = actor;
  a.target_critic = critic;
  a.actor_opt = make_adam(actor);
  a.critic_opt = make_adam(critic);
  a.cfg = cfg;
  a.state_lo = state_lo;
  a.state_hi = state_hi;
  a.action_lo = action_lo;
  a.action_hi = action_hi;
  a.stochastic = stochastic;
  a.noise = Rng(derive_seed(cfg.seed, 0x43));
  return a;
}

Vec act(Agent& agent, const Vec& s, bool explore) {
  require(s.size() == agent.state_lo.size(), "act: state dimension mismatch");
  Vec u = agent.actor.forward(clamp_box(s, agent.state_lo, agent.state_hi));
  if (explore && agent.stochastic) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double range = agent.action_hi[j] - agent.action_lo[j];
      u[j] += agent.cfg.noise_sigma * range * agent.noise.normal();
    }
  }
  return clamp_box(u, agent.action_lo, agent.action_hi);
}

double critic_update(Agent& agent, const std::vector<Transition>& batch) {
  require(!batch.empty(), "critic_update: empty batch");
  const double n = static_cast<double>(batch.size());
  // Targets come from the frozen copies so the regression target stays put
  // while the online critic steps. A terminal transition keeps only the
  // immediate cost.
  Vec targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    double y = tr.cost;
    if (!tr.terminal) {
      const Vec un = target_action(agent, tr.s_next);
      y += agent.cfg.gamma * agent.target_critic.forward(joined(tr.s_next, un))[0];
    }
    targets[i] = y;
  }
  std::vector<LayerGrad> total = zero_grads(agent.critic);
  double mse = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vec in = joined(batch[i].s, batch[i].u);
    const double err = agent.critic.forward(in)[0] - targets[i];
    mse += err * err / n;
    accumulate(total, agent.critic.gradients(in, Vec{2.0 * err / n}).layers);
  }
  adam_step(agent.critic, total, agent.critic_opt, agent.cfg.lr_critic);
  return mse;
}

ActorUpdate actor_update(Agent& agent, const std::vector<Transition>& batch) {
  require(!batch.empty(), "actor_update: empty batch");
  const double n = static_cast<double>(batch.size());
  const std::size_t ns = agent.state_lo.size();
  std::vector<LayerGrad> total = zero_grads(agent.actor);
  double mean_q = 0.0;
  for (const Transition& tr : batch) {
    const Vec x = clamp_box(tr.s, agent.state_lo, agent.state_hi);
    const Vec u = agent.actor.forward(x);
    const Vec in = joined(tr.s, u);
    mean_q += agent.critic.forward(in)[0] / n;
    // Chain rule through the critic's action slice; the state slice of
    // d_input is not the actor's doing and is dropped.
    const GradientResult through = agent.critic.gradients(in, Vec{1.0 / n});
    const Vec upstream(through.d_input.begin() + static_cast<std::ptrdiff_t>(ns),
                       through.d_input.end());
    accumulate(total, agent.actor.gradients(x, upstream).layers);
  }
  double norm_sq = 0.0;
  for (std::size_t li = 0; li < agent.actor.layers.size(); ++li) {
    const Layer& l = agent.actor.layers[li];
    if (l.kind != LayerKind::Affine) continue;
    for (std::size_t i = 0; i < l.W.rows(); ++i) {
      for (std::size_t j = 0; j < l.W.cols(); ++j) {
        if (l.w_mask(i, j) != 0.0) norm_sq += total[li].dW(i, j) * total[li].dW(i, j);
      }
    }
    if (!l.has_bias) continue;
    for (std::size_t i = 0; i < l.b.size(); ++i) {
      if (l.b_mask[i] != 0.0) norm_sq += total[li].db[i] * total[li].db[i];
    }
  }
  adam_step(agent.actor, total, agent.actor_opt, agent.cfg.lr_actor);
  return ActorUpdate{mean_q, std::sqrt(norm_sq)};
}

TrainingLog train(Environment& env, Agent& agent, int episodes,
                  const EpisodeCallback& on_episode) {
  require(episodes >= 0, "train: negative episode count");
  const EnvSpec& spec = env.spec();
  require(spec.state_dim == agent.state_lo.size() && spec.action_dim == agent.action_lo.size(),
          "train: agent does not match the environment");
  ReplayBuffer buffer(agent.cfg.buffer_capacity, derive_seed(agent.cfg.seed, 0x42));
  TrainingLog log;
  log.episodes.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    Vec s = env.reset(derive_seed(agent.cfg.seed, 0x1000 + static_cast<std::uint64_t>(e)));
    EpisodeStats st;
    st.episode = e;
    double loss_sum = 0.0, q_sum = 0.0;
    int updates = 0;
    for (int k = 0; k < spec.steps_per_episode; ++k) {
      const Vec u = act(agent, s, true);
      const StepOutcome out = env.step(u);
      st.total_cost += out.cost;
      if (out.violated) ++st.violations;
      // A safety cut stops the value recursion; running out of steps does
      // not, so those transitions keep bootstrapping.
      const bool terminal = out.violated || out.fault;
      buffer.push(Transition{s, u, out.cost, out.state, terminal});
      s = out.state;
      ++st.steps;
      if (buffer.size() >= agent.cfg.batch) {
        const std::vector<Transition> batch = buffer.sample(agent.cfg.batch);
        loss_sum += critic_update(agent, batch);
        q_sum += actor_update(agent, batch).mean_q;
        polyak(agent.target_critic, agent.critic, agent.cfg.tau_critic);
        polyak(agent.target_actor, agent.actor, agent.cfg.tau_actor);
        ++updates;
      }
      if (out.fault) st.fault = true;
      if (terminal) break;
    }
    if (updates > 0) {
      st.mean_critic_loss = loss_sum / updates;
      st.mean_q = q_sum / updates;
    }
    log.episodes.push_back(st);
    if (on_episode) on_episode(st, agent);
  }
  return log;
}

std::vector<EvalEpisode> evaluate(Environment& env, Agent& agent,
                                  const std::vector<std::uint64_t>& seeds) {
  const EnvSpec& spec = env.spec();
  require(spec.state_dim == agent.state_lo.size() && spec.action_dim == agent.action_lo.size(),
          "evaluate: agent does not match the environment");
  std::vector<EvalEpisode> out;
  out.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    Vec s = env.reset(seed);
    EvalEpisode ep;
    for (int k = 0; k < spec.steps_per_episode; ++k) {
      const StepOutcome o = env.step(act(agent, s, false));
      ep.total_cost += o.cost;
      if (o.violated) ++ep.violations;
      ++ep.steps;
      s = o.state;
      if (o.violated || o.fault) break;
    }
    out.push_back(ep);
  }
  return out;
}

LayeredNetwork make_mlp_actor(std::size_t n, std::size_t m, const Vec& action_hi,
                              std::size_t hidden, std::uint64_t seed) {
  require(n >= 1 && m >= 1 && hidden >= 1, "make_mlp_actor: empty dimension");
  require(action_hi.size() == m, "make_mlp_actor: action bound size mismatch");
  Rng rng(seed);
  const double l1 = 1.0 / std::sqrt(static_cast<double>(n));
  const double l2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  LayeredNetwork net;
  net.input_dim = n;
  net.output_dim = m;
  net.layers.push_back(
      affine_layer(uniform_matrix(hidden, n, l1, rng), uniform_vec(hidden, l1, rng), true, {-1}));
  net.layers.push_back(activation_layer(Act::Relu, {0}));
  net.layers.push_back(affine_layer(uniform_matrix(hidden, hidden, l2, rng),
                                    uniform_vec(hidden, l2, rng), true, {1}));
  net.layers.push_back(activation_layer(Act::Relu, {2}));
  // Small final init keeps early actions near zero; tanh bounds them and the
  // frozen diagonal rescales to the actuator limit.
  net.layers.push_back(
      affine_layer(uniform_matrix(m, hidden, 3e-3, rng), uniform_vec(m, 3e-3, rng), true, {3}));
  net.layers.push_back(activation_layer(Act::Tanh, {4}));
  net.layers.push_back(affine_layer_no_bias(Matrix::diag(action_hi), false, {5}));
  net.validate();
  return net;
}

LayeredNetwork make_mlp_critic(std::size_t n, std::size_t m, std::size_t hidden,
                               std::uint64_t seed) {
  require(n >= 1 && m >= 1 && hidden >= 1, "make_mlp_critic: empty dimension");
  Rng rng(seed);
  const std::size_t in = n + m;
  const double l1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double l2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  LayeredNetwork net;
  net.input_dim = in;
  net.output_dim = 1;
  net.layers.push_back(
      affine_layer(uniform_matrix(hidden, in, l1, rng), uniform_vec(hidden, l1, rng), true, {-1}));
  net.layers.push_back(activation_layer(Act::Relu, {0}));
  net.layers.push_back(affine_layer(uniform_matrix(hidden, hidden, l2, rng),
                                    uniform_vec(hidden, l2, rng), true, {1}));
  net.layers.push_back(activation_layer(Act::Relu, {2}));
  net.layers.push_back(
      affine_layer(uniform_matrix(1, hidden, 3e-3, rng), uniform_vec(1, 3e-3, rng), true, {3}));
  net.validate();
  return net;
}

}  // namespace yannrl
