#include "yannrl/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "yannrl/errors.hpp"

namespace yannrl {

namespace {

const Json& req(const Json& j, const char* key, const char* what) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string(what) + ": missing key \"" + key + "\"");
  }
  return *it;
}

// Merge-style reader: copies only the keys that are present and rejects the
// ones that belong to no field, so config typos fail loudly.
class Fields {
 public:
  Fields(const Json& j, const char* what) : j_(j), what_(what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
  }

  template <typename T>
  Fields& get(const char* key, T& into) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    if (it != j_.end()) it->get_to(into);
    return *this;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      bool known = false;
      for (const char* k : seen_) {
        if (item.key() == k) {
          known = true;
          break;
        }
      }
      if (!known) {
        throw std::invalid_argument(std::string(what_) + ": unknown key \"" + item.key() + "\"");
      }
    }
  }

 private:
  const Json& j_;
  const char* what_;
  std::vector<const char*> seen_;
};

const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Affine: return "affine";
    case LayerKind::Activation: return "activation";
    case LayerKind::PairwiseProduct: return "pairwise_product";
    case LayerKind::Concat: return "concat";
    case LayerKind::GroupSum: return "group_sum";
  }
  throw std::invalid_argument("unknown layer kind");
}

LayerKind kind_from(const std::string& s) {
  if (s == "affine") return LayerKind::Affine;
  if (s == "activation") return LayerKind::Activation;
  if (s == "pairwise_product") return LayerKind::PairwiseProduct;
  if (s == "concat") return LayerKind::Concat;
  if (s == "group_sum") return LayerKind::GroupSum;
  throw std::invalid_argument("unknown layer kind \"" + s + "\"");
}

const char* act_name(Act a) {
  switch (a) {
    case Act::Identity: return "identity";
    case Act::Relu: return "relu";
    case Act::Tanh: return "tanh";
    case Act::Step: return "step";
  }
  throw std::invalid_argument("unknown activation");
}

Act act_from(const std::string& s) {
  if (s == "identity") return Act::Identity;
  if (s == "relu") return Act::Relu;
  if (s == "tanh") return Act::Tanh;
  if (s == "step") return Act::Step;
  throw std::invalid_argument("unknown activation \"" + s + "\"");
}

bool finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void to_json(Json& j, const Matrix& m) {
  j = Json{{"rows", m.rows()}, {"cols", m.cols()}};
  Vec data(m.data(), m.data() + m.rows() * m.cols());
  j["data"] = data;
}

void from_json(const Json& j, Matrix& m) {
  const std::size_t rows = req(j, "rows", "matrix").get<std::size_t>();
  const std::size_t cols = req(j, "cols", "matrix").get<std::size_t>();
  const Vec data = req(j, "data", "matrix").get<Vec>();
  if (data.size() != rows * cols) {
    throw std::invalid_argument("matrix: data length does not match rows*cols");
  }
  m = Matrix(rows, cols);
  for (std::size_t i = 0; i < data.size(); ++i) m.data()[i] = data[i];
}

void to_json(Json& j, const Polytope& p) { j = Json{{"F", p.F}, {"g", p.g}}; }

void from_json(const Json& j, Polytope& p) {
  p.F = req(j, "F", "polytope").get<Matrix>();
  p.g = req(j, "g", "polytope").get<Vec>();
  require(p.F.rows() == p.g.size(), "polytope: F rows must match g size");
}

void to_json(Json& j, const Layer& l) {
  j = Json{{"kind", kind_name(l.kind)}, {"inputs", l.inputs}};
  switch (l.kind) {
    case LayerKind::Affine:
      j["W"] = l.W;
      j["w_mask"] = l.w_mask;
      j["has_bias"] = l.has_bias;
      if (l.has_bias) {
        j["b"] = l.b;
        j["b_mask"] = l.b_mask;
      }
      break;
    case LayerKind::Activation:
      j["act"] = act_name(l.act);
      break;
    case LayerKind::GroupSum:
      j["group"] = l.group;
      break;
    case LayerKind::PairwiseProduct:
    case LayerKind::Concat:
      break;
  }
}

void from_json(const Json& j, Layer& l) {
  l = Layer{};
  l.kind = kind_from(req(j, "kind", "layer").get<std::string>());
  l.inputs = req(j, "inputs", "layer").get<std::vector<int>>();
  switch (l.kind) {
    case LayerKind::Affine:
      l.W = req(j, "W", "layer").get<Matrix>();
      l.w_mask = req(j, "w_mask", "layer").get<Matrix>();
      l.has_bias = req(j, "has_bias", "layer").get<bool>();
      if (l.has_bias) {
        l.b = req(j, "b", "layer").get<Vec>();
        l.b_mask = req(j, "b_mask", "layer").get<Vec>();
      }
      break;
    case LayerKind::Activation:
      l.act = act_from(req(j, "act", "layer").get<std::string>());
      break;
    case LayerKind::GroupSum:
      l.group = req(j, "group", "layer").get<std::size_t>();
      break;
    case LayerKind::PairwiseProduct:
    case LayerKind::Concat:
      break;
  }
}

void to_json(Json& j, const LayeredNetwork& n) {
  for (std::size_t i = 0; i < n.layers.size(); ++i) {
    if (!n.layers[i].W.all_finite() || !finite(n.layers[i].b)) {
      throw NumericError("network save: non-finite parameter in layer " + std::to_string(i));
    }
  }
  j = Json{{"input_dim", n.input_dim}, {"output_dim", n.output_dim}, {"layers", n.layers}};
}

void from_json(const Json& j, LayeredNetwork& n) {
  n.input_dim = req(j, "input_dim", "network").get<std::size_t>();
  n.output_dim = req(j, "output_dim", "network").get<std::size_t>();
  n.layers = req(j, "layers", "network").get<std::vector<Layer>>();
  n.validate();
}

void to_json(Json& j, const PwaRegion& r) { j = Json{{"dom", r.dom}, {"K", r.K}, {"r", r.r}}; }

void from_json(const Json& j, PwaRegion& r) {
  r.dom = req(j, "dom", "pwa region").get<Polytope>();
  r.K = req(j, "K", "pwa region").get<Matrix>();
  r.r = req(j, "r", "pwa region").get<Vec>();
}

void to_json(Json& j, const PwaLaw& law) {
  j = Json{{"n_in", law.n_in},
           {"n_out", law.n_out},
           {"domain", law.domain},
           {"regions", law.regions}};
}

void from_json(const Json& j, PwaLaw& law) {
  law.n_in = req(j, "n_in", "pwa law").get<std::size_t>();
  law.n_out = req(j, "n_out", "pwa law").get<std::size_t>();
  law.domain = req(j, "domain", "pwa law").get<Polytope>();
  law.regions = req(j, "regions", "pwa law").get<std::vector<PwaRegion>>();
}

void to_json(Json& j, const MpqpRegion& r) {
  j = Json{{"dom", r.dom},
           {"gain", r.gain},
           {"offset", r.offset},
           {"active_set", r.active_set},
           {"chebyshev_radius", r.chebyshev_radius}};
}

void from_json(const Json& j, MpqpRegion& r) {
  r.dom = req(j, "dom", "region").get<Polytope>();
  r.gain = req(j, "gain", "region").get<Matrix>();
  r.offset = req(j, "offset", "region").get<Vec>();
  r.active_set = req(j, "active_set", "region").get<std::vector<int>>();
  r.chebyshev_radius = req(j, "chebyshev_radius", "region").get<double>();
}

void to_json(Json& j, const MpqpSolution& s) {
  j = Json{{"regions", s.regions},
           {"n_param", s.n_param},
           {"n_seq", s.n_seq},
           {"qp_count", s.qp_count},
           {"notes", s.notes}};
}

void from_json(const Json& j, MpqpSolution& s) {
  s.regions = req(j, "regions", "mpqp solution").get<std::vector<MpqpRegion>>();
  s.n_param = req(j, "n_param", "mpqp solution").get<std::size_t>();
  s.n_seq = req(j, "n_seq", "mpqp solution").get<std::size_t>();
  s.qp_count = req(j, "qp_count", "mpqp solution").get<int>();
  s.notes = req(j, "notes", "mpqp solution").get<std::vector<std::string>>();
}

void to_json(Json& j, const MpcDesign& d) {
  j = Json{{"A", d.A},
           {"B", d.B},
           {"Qw", d.Qw},
           {"R", d.R},
           {"P", d.P},
           {"horizon", d.horizon},
           {"state_set", d.state_set},
           {"input_set", d.input_set},
           {"terminal_set", d.terminal_set},
           {"terminal_at_horizon", d.terminal_at_horizon}};
}

void from_json(const Json& j, MpcDesign& d) {
  d.A = req(j, "A", "mpc design").get<Matrix>();
  d.B = req(j, "B", "mpc design").get<Matrix>();
  d.Qw = req(j, "Qw", "mpc design").get<Matrix>();
  d.R = req(j, "R", "mpc design").get<Matrix>();
  d.P = req(j, "P", "mpc design").get<Matrix>();
  d.horizon = req(j, "horizon", "mpc design").get<std::size_t>();
  d.state_set = req(j, "state_set", "mpc design").get<Polytope>();
  d.input_set = req(j, "input_set", "mpc design").get<Polytope>();
  d.terminal_set = req(j, "terminal_set", "mpc design").get<Polytope>();
  d.terminal_at_horizon = req(j, "terminal_at_horizon", "mpc design").get<bool>();
}

void to_json(Json& j, const AgentConfig& c) {
  j = Json{{"gamma", c.gamma},
           {"lr_actor", c.lr_actor},
           {"lr_critic", c.lr_critic},
           {"tau_actor", c.tau_actor},
           {"tau_critic", c.tau_critic},
           {"batch", c.batch},
           {"buffer_capacity", c.buffer_capacity},
           {"noise_sigma", c.noise_sigma}};
}

void from_json(const Json& j, AgentConfig& c) {
  Fields f(j, "agent_cfg");
  f.get("gamma", c.gamma)
      .get("lr_actor", c.lr_actor)
      .get("lr_critic", c.lr_critic)
      .get("tau_actor", c.tau_actor)
      .get("tau_critic", c.tau_critic)
      .get("batch", c.batch)
      .get("buffer_capacity", c.buffer_capacity)
      .get("noise_sigma", c.noise_sigma);
  f.finish();
}

void to_json(Json& j, const PendulumParams& p) {
  j = Json{{"gravity", p.gravity},
           {"length", p.length},
           {"mass", p.mass},
           {"dt", p.dt},
           {"torque_limit", p.torque_limit},
           {"speed_limit", p.speed_limit},
           {"angle_bound", p.angle_bound},
           {"steps_per_episode", p.steps_per_episode},
           {"reset_span", p.reset_span}};
}

void from_json(const Json& j, PendulumParams& p) {
  Fields f(j, "pendulum");
  f.get("gravity", p.gravity)
      .get("length", p.length)
      .get("mass", p.mass)
      .get("dt", p.dt)
      .get("torque_limit", p.torque_limit)
      .get("speed_limit", p.speed_limit)
      .get("angle_bound", p.angle_bound)
      .get("steps_per_episode", p.steps_per_episode)
      .get("reset_span", p.reset_span);
  f.finish();
}

void to_json(Json& j, const CstrParams& p) {
  j = Json{{"volume", p.volume},
           {"density", p.density},
           {"heat_capacity", p.heat_capacity},
           {"transfer_area", p.transfer_area},
           {"coolant_temp", p.coolant_temp},
           {"dh1", p.dh1},
           {"dh2", p.dh2},
           {"arrhenius1", p.arrhenius1},
           {"arrhenius2", p.arrhenius2},
           {"activation1", p.activation1},
           {"activation2", p.activation2},
           {"gas_constant", p.gas_constant},
           {"flow", p.flow},
           {"feed_a", p.feed_a},
           {"feed_b", p.feed_b},
           {"feed_s", p.feed_s},
           {"feed_temp", p.feed_temp},
           {"t_star", p.t_star},
           {"u_unit", p.u_unit},
           {"u_limit", p.u_limit},
           {"safety_temp", p.safety_temp},
           {"safety_penalty", p.safety_penalty},
           {"dt", p.dt},
           {"steps_per_episode", p.steps_per_episode},
           {"reset_lo", p.reset_lo},
           {"reset_hi", p.reset_hi},
           {"disable_reactions", p.disable_reactions}};
}

void from_json(const Json& j, CstrParams& p) {
  Fields f(j, "cstr");
  f.get("volume", p.volume)
      .get("density", p.density)
      .get("heat_capacity", p.heat_capacity)
      .get("transfer_area", p.transfer_area)
      .get("coolant_temp", p.coolant_temp)
      .get("dh1", p.dh1)
      .get("dh2", p.dh2)
      .get("arrhenius1", p.arrhenius1)
      .get("arrhenius2", p.arrhenius2)
      .get("activation1", p.activation1)
      .get("activation2", p.activation2)
      .get("gas_constant", p.gas_constant)
      .get("flow", p.flow)
      .get("feed_a", p.feed_a)
      .get("feed_b", p.feed_b)
      .get("feed_s", p.feed_s)
      .get("feed_temp", p.feed_temp)
      .get("t_star", p.t_star)
      .get("u_unit", p.u_unit)
      .get("u_limit", p.u_limit)
      .get("safety_temp", p.safety_temp)
      .get("safety_penalty", p.safety_penalty)
      .get("dt", p.dt)
      .get("steps_per_episode", p.steps_per_episode)
      .get("reset_lo", p.reset_lo)
      .get("reset_hi", p.reset_hi)
      .get("disable_reactions", p.disable_reactions);
  f.finish();
}

RunConfig default_run_config(const std::string& env) {
  RunConfig cfg;
  cfg.env = env;
  if (env == "pendulum") {
    cfg.actor_hidden = 16;
    cfg.out_dir = "runs/pendulum";
  } else if (env == "cstr") {
    cfg.actor_hidden = 8;
    cfg.out_dir = "runs/cstr";
  } else {
    throw std::invalid_argument("unknown environment \"" + env +
                                "\" (registered: pendulum, cstr)");
  }
  return cfg;
}

void to_json(Json& j, const RunConfig& c) {
  j = Json{{"env", c.env},
           {"agent", c.agent},
           {"agent_cfg", c.agent_cfg},
           {"actor_hidden", c.actor_hidden},
           {"critic_hidden", c.critic_hidden},
           {"zero_init_scale", c.zero_init_scale},
           {"mlp_hidden", c.mlp_hidden},
           {"train_episodes", c.train_episodes},
           {"eval_episodes", c.eval_episodes},
           {"out_dir", c.out_dir},
           {"seed", c.seed},
           {"pendulum", c.pendulum},
           {"cstr", c.cstr}};
}

void from_json(const Json& j, RunConfig& c) {
  Fields f(j, "config");
  f.get("env", c.env)
      .get("agent", c.agent)
      .get("agent_cfg", c.agent_cfg)
      .get("actor_hidden", c.actor_hidden)
      .get("critic_hidden", c.critic_hidden)
      .get("zero_init_scale", c.zero_init_scale)
      .get("mlp_hidden", c.mlp_hidden)
      .get("train_episodes", c.train_episodes)
      .get("eval_episodes", c.eval_episodes)
      .get("out_dir", c.out_dir)
      .get("seed", c.seed)
      .get("pendulum", c.pendulum)
      .get("cstr", c.cstr);
  f.finish();
  if (c.env != "pendulum" && c.env != "cstr") {
    throw std::invalid_argument("unknown environment \"" + c.env +
                                "\" (registered: pendulum, cstr)");
  }
  if (c.agent != "yann-ddpg" && c.agent != "ddpg") {
    throw std::invalid_argument("unknown agent \"" + c.agent +
                                "\" (registered: yann-ddpg, ddpg)");
  }
  require(c.train_episodes >= 0, "config: train_episodes must be nonnegative");
  require(c.eval_episodes >= 1, "config: eval_episodes must be at least 1");
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  std::string env = "pendulum";
  const auto it = j.find("env");
  if (it != j.end()) env = it->get<std::string>();
  RunConfig cfg = default_run_config(env);
  from_json(j, cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(load_json_file(path));
}

void apply_override(RunConfig& cfg, const std::string& dotted_path, const std::string& value) {
  Json j = cfg;
  Json* node = &j;
  std::size_t start = 0;
  std::vector<std::string> parts;
  while (true) {
    const std::size_t dot = dotted_path.find('.', start);
    parts.push_back(dotted_path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) {
      throw std::invalid_argument("unknown config key \"" + dotted_path + "\"");
    }
    node = &(*node)[parts[i]];
  }
  const std::string& leaf = parts.back();
  if (leaf.empty() || !node->contains(leaf)) {
    throw std::invalid_argument("unknown config key \"" + dotted_path + "\"");
  }
  Json parsed = Json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || ((*node)[leaf].is_string() && !parsed.is_string())) {
    parsed = value;
  }
  (*node)[leaf] = parsed;
  cfg = run_config_from_json(j);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  const Json j = cfg;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return std::string(buf);
}

Json provenance(const std::string& config_hash, std::uint64_t seed) {
  return Json{{"config", config_hash},
              {"seed", seed},
              {"toolkit", kToolkitVersion},
              {"format", kFormatVersion}};
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open \"" + path + "\" for writing");
  out << content;
  out.flush();
  if (!out) throw std::invalid_argument("write to \"" + path + "\" failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Json load_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw std::invalid_argument("\"" + path + "\" is not valid JSON");
  return j;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

namespace {

std::string csv_preamble(const std::string& config_hash, std::uint64_t seed) {
  return "# config=" + config_hash + " seed=" + std::to_string(seed) + "\n";
}

}  // namespace

std::string training_log_csv(const TrainingLog& log, const std::string& config_hash,
                             std::uint64_t seed) {
  std::string out = csv_preamble(config_hash, seed);
  out += "episode,total_cost,violations,mean_critic_loss,mean_Q\n";
  for (const EpisodeStats& e : log.episodes) {
    out += std::to_string(e.episode) + ',' + csv_number(e.total_cost) + ',' +
           std::to_string(e.violations) + ',' + csv_number(e.mean_critic_loss) + ',' +
           csv_number(e.mean_q) + '\n';
  }
  return out;
}

std::string eval_episodes_csv(const std::vector<EvalEpisode>& eps, const std::string& config_hash,
                              std::uint64_t seed) {
  std::string out = csv_preamble(config_hash, seed);
  out += "episode,total_cost,violations,steps\n";
  for (std::size_t i = 0; i < eps.size(); ++i) {
    out += std::to_string(i) + ',' + csv_number(eps[i].total_cost) + ',' +
           std::to_string(eps[i].violations) + ',' + std::to_string(eps[i].steps) + '\n';
  }
  return out;
}

std::string trajectory_csv(const std::vector<TrajectoryStep>& steps,
                           const std::string& config_hash, std::uint64_t seed) {
  require(!steps.empty(), "trajectory_csv: no steps");
  std::string out = csv_preamble(config_hash, seed);
  out += "t";
  for (std::size_t i = 0; i < steps[0].state.size(); ++i) {
    out += ",state_" + std::to_string(i);
  }
  for (std::size_t i = 0; i < steps[0].action.size(); ++i) {
    out += ",action_" + std::to_string(i);
  }
  out += ",cost,violation\n";
  for (const TrajectoryStep& s : steps) {
    out += csv_number(s.t);
    for (double x : s.state) out += ',' + csv_number(x);
    for (double u : s.action) out += ',' + csv_number(u);
    out += ',' + csv_number(s.cost) + ',' + std::string(s.violated ? "1" : "0") + '\n';
  }
  return out;
}

BenchmarkReport make_benchmark_report(const std::string& env, const std::string& agent,
                                      const std::vector<EvalEpisode>& initial,
                                      const std::vector<EvalEpisode>& final_evals,
                                      const TrainingLog& log, const std::string& config_hash,
                                      std::uint64_t seed) {
  require(initial.size() == final_evals.size(), "benchmark: eval set sizes differ");
  require(!initial.empty(), "benchmark: empty eval set");
  BenchmarkReport r;
  r.env = env;
  r.agent = agent;
  r.config_hash = config_hash;
  r.seed = seed;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    BenchmarkRow row;
    row.episode = static_cast<int>(i) + 1;
    row.initial = initial[i].total_cost;
    row.final_cost = final_evals[i].total_cost;
    row.change = row.final_cost - row.initial;
    r.rows.push_back(row);
    r.initial_eval_violations += initial[i].violations;
    r.final_eval_violations += final_evals[i].violations;
  }
  const double n = static_cast<double>(r.rows.size());
  for (const BenchmarkRow& row : r.rows) {
    r.initial_mean += row.initial / n;
    r.final_mean += row.final_cost / n;
    r.change_mean += row.change / n;
  }
  for (const EpisodeStats& e : log.episodes) r.train_violations += e.violations;
  return r;
}

void to_json(Json& j, const BenchmarkReport& r) {
  Json rows = Json::array();
  for (const BenchmarkRow& row : r.rows) {
    rows.push_back(Json{{"episode", row.episode},
                        {"initial", row.initial},
                        {"final", row.final_cost},
                        {"change", row.change}});
  }
  j = Json{{"provenance", provenance(r.config_hash, r.seed)},
           {"env", r.env},
           {"agent", r.agent},
           {"rows", rows},
           {"initial_mean", r.initial_mean},
           {"final_mean", r.final_mean},
           {"change_mean", r.change_mean},
           {"train_violations", r.train_violations},
           {"initial_eval_violations", r.initial_eval_violations},
           {"final_eval_violations", r.final_eval_violations}};
}

void from_json(const Json& j, BenchmarkReport& r) {
  const Json& prov = req(j, "provenance", "report");
  r.config_hash = req(prov, "config", "report").get<std::string>();
  r.seed = req(prov, "seed", "report").get<std::uint64_t>();
  r.env = req(j, "env", "report").get<std::string>();
  r.agent = req(j, "agent", "report").get<std::string>();
  r.rows.clear();
  for (const Json& row : req(j, "rows", "report")) {
    BenchmarkRow b;
    b.episode = req(row, "episode", "report row").get<int>();
    b.initial = req(row, "initial", "report row").get<double>();
    b.final_cost = req(row, "final", "report row").get<double>();
    b.change = req(row, "change", "report row").get<double>();
    r.rows.push_back(b);
  }
  r.initial_mean = req(j, "initial_mean", "report").get<double>();
  r.final_mean = req(j, "final_mean", "report").get<double>();
  r.change_mean = req(j, "change_mean", "report").get<double>();
  r.train_violations = req(j, "train_violations", "report").get<int>();
  r.initial_eval_violations = req(j, "initial_eval_violations", "report").get<int>();
  r.final_eval_violations = req(j, "final_eval_violations", "report").get<int>();
}

std::string benchmark_table(const BenchmarkReport& r) {
  char line[128];
  std::string out = "Benchmark: " + r.env + " / " + r.agent + "\n";
  out += "config=" + r.config_hash + " seed=" + std::to_string(r.seed) + "\n\n";
  std::snprintf(line, sizeof line, "%-8s %12s %12s %12s\n", "Episode", "Initial", "Final",
                "Change");
  out += line;
  for (const BenchmarkRow& row : r.rows) {
    std::snprintf(line, sizeof line, "%-8d %12.2f %12.2f %12.2f\n", row.episode, row.initial,
                  row.final_cost, row.change);
    out += line;
  }
  std::snprintf(line, sizeof line, "%-8s %12.2f %12.2f %12.2f\n", "Average", r.initial_mean,
                r.final_mean, r.change_mean);
  out += line;
  if (r.env == "cstr") {
    std::snprintf(line, sizeof line,
                  "\nSafety violations: training %d, evaluation %d (initial) / %d (final)\n",
                  r.train_violations, r.initial_eval_violations, r.final_eval_violations);
    out += line;
  }
  return out;
}

}  // namespace yannrl
