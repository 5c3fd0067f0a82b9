#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "yannrl/envs.hpp"
#include "yannrl/errors.hpp"
#include "yannrl/mpqp.hpp"
#include "yannrl/serialize.hpp"
#include "yannrl/yann.hpp"

using namespace yannrl;

namespace {

bool same_bits(double a, double b) {
  std::uint64_t ua, ub;
  std::memcpy(&ua, &a, sizeof ua);
  std::memcpy(&ub, &b, sizeof ub);
  return ua == ub;
}

bool same_bits(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

struct SolvedLaw {
  MpqpProblem prob;
  MpqpSolution sol;
  PwaLaw law;
};

const SolvedLaw& swingup_law() {
  static const SolvedLaw s = [] {
    SolvedLaw out;
    out.prob = condense_mpc(make_linear_design(PendulumParams{}));
    out.sol = solve_mpqp(out.prob);
    out.law = first_move_law(out.sol, out.prob.n_input, out.prob.domain);
    return out;
  }();
  return s;
}

// dump + parse, the exact path every weight file takes
template <typename T>
T round_trip(const T& value) {
  const Json j = value;
  const Json back = Json::parse(j.dump());
  return back.get<T>();
}

const std::vector<Vec> kProbeStates = {
    {0.0, 0.0}, {0.05, 0.02}, {-0.1, 0.3}, {0.2, -0.4}, {-0.21, 0.13}};

}  // namespace

TEST_CASE("matrix json preserves doubles bit for bit") {
  Matrix m(2, 3);
  m(0, 0) = -0.0;
  m(0, 1) = 1.0 / 3.0;
  m(0, 2) = 1e-17;
  m(1, 0) = -1.7976931348623157e308;
  m(1, 1) = 5e-324;  // smallest denormal
  m(1, 2) = 0.1;
  const Matrix back = round_trip(m);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(same_bits(back(i, k), m(i, k)));
    }
  }
  CHECK(std::signbit(back(0, 0)));
}

TEST_CASE("matrix json rejects inconsistent shape") {
  Json j = Json{{"rows", 2}, {"cols", 2}, {"data", Vec{1.0, 2.0, 3.0}}};
  Matrix m;
  CHECK_THROWS_AS(j.get_to(m), std::invalid_argument);
  Json missing = Json{{"rows", 1}, {"cols", 1}};
  CHECK_THROWS_AS(missing.get_to(m), std::invalid_argument);
}

TEST_CASE("pwa law survives a round trip") {
  const PwaLaw& law = swingup_law().law;
  const PwaLaw back = round_trip(law);
  REQUIRE(back.regions.size() == law.regions.size());
  CHECK(back.n_in == law.n_in);
  CHECK(back.n_out == law.n_out);
  for (const Vec& s : kProbeStates) {
    CHECK(back.locate(s) == law.locate(s));
    const auto u = law.evaluate(s);
    const auto u_back = back.evaluate(s);
    REQUIRE(u.has_value());
    REQUIRE(u_back.has_value());
    CHECK(same_bits(*u_back, *u));
  }
}

TEST_CASE("mpqp solution and mpc design survive a round trip") {
  const MpqpSolution& sol = swingup_law().sol;
  const MpqpSolution sol_back = round_trip(sol);
  REQUIRE(sol_back.regions.size() == sol.regions.size());
  CHECK(sol_back.n_param == sol.n_param);
  CHECK(sol_back.n_seq == sol.n_seq);
  CHECK(sol_back.qp_count == sol.qp_count);
  for (std::size_t i = 0; i < sol.regions.size(); ++i) {
    CHECK(sol_back.regions[i].active_set == sol.regions[i].active_set);
    CHECK(same_bits(sol_back.regions[i].chebyshev_radius, sol.regions[i].chebyshev_radius));
    CHECK(max_abs_diff(sol_back.regions[i].gain, sol.regions[i].gain) == 0.0);
  }

  const MpcDesign d = make_linear_design(PendulumParams{});
  const MpcDesign d_back = round_trip(d);
  CHECK(max_abs_diff(d_back.A, d.A) == 0.0);
  CHECK(max_abs_diff(d_back.B, d.B) == 0.0);
  CHECK(max_abs_diff(d_back.P, d.P) == 0.0);
  CHECK(d_back.horizon == d.horizon);
  CHECK(d_back.terminal_at_horizon == d.terminal_at_horizon);
  CHECK(max_abs_diff(d_back.state_set.F, d.state_set.F) == 0.0);
  CHECK(same_bits(d_back.input_set.g, d.input_set.g));
}

TEST_CASE("networks from every builder round trip with bitwise forward passes") {
  const SolvedLaw& s = swingup_law();
  const MpcDesign d = make_linear_design(PendulumParams{});

  std::vector<LayeredNetwork> nets;
  nets.push_back(build_exact_yann(s.law));
  ZeroBlockSpec aspec;
  aspec.hidden = 4;
  aspec.rng_seed = 7;
  nets.push_back(build_yann_actor(s.law, aspec, d.input_set));
  ZeroBlockSpec cspec;
  cspec.hidden = 16;
  cspec.rng_seed = 9;
  nets.push_back(build_yann_critic(d.A, d.B, d.Qw, d.R, d.P, 1.0, cspec));
  nets.push_back(make_mlp_actor(2, 1, {2.0}, 32, 3));
  nets.push_back(make_mlp_critic(2, 1, 32, 4));

  for (const LayeredNetwork& net : nets) {
    const LayeredNetwork back = round_trip(net);
    CHECK(back.layers.size() == net.layers.size());
    CHECK(back.total_parameters() == net.total_parameters());
    CHECK(back.trainable_parameters() == net.trainable_parameters());
    for (const Vec& probe : kProbeStates) {
      Vec x(net.input_dim);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = probe[i % probe.size()];
      CHECK(same_bits(back.forward(x), net.forward(x)));
    }
  }
}

TEST_CASE("saving a network with a non-finite weight throws") {
  LayeredNetwork net = make_mlp_critic(2, 1, 4, 1);
  net.layers[0].W(0, 0) = std::numeric_limits<double>::quiet_NaN();
  Json j;
  CHECK_THROWS_AS(to_json(j, net), NumericError);
}

TEST_CASE("network load validates wiring and names bad enum strings") {
  const LayeredNetwork net = make_mlp_actor(2, 1, {1.0}, 4, 1);
  Json j = net;
  Json broken = j;
  broken["layers"][0]["kind"] = "afine";
  LayeredNetwork out;
  CHECK_THROWS_AS(broken.get_to(out), std::invalid_argument);

  Json mislabeled = j;
  mislabeled["layers"][1]["act"] = "swish";
  CHECK_THROWS_AS(mislabeled.get_to(out), std::invalid_argument);

  // lie about the input width: the first affine no longer lines up
  Json rewired = j;
  rewired["input_dim"] = 5;
  CHECK_THROWS_AS(rewired.get_to(out), std::invalid_argument);
}

TEST_CASE("default run configs differ per environment") {
  const RunConfig p = default_run_config("pendulum");
  CHECK(p.actor_hidden == 16);
  CHECK(p.out_dir == "runs/pendulum");
  CHECK(p.agent == "yann-ddpg");
  CHECK(p.train_episodes == 50);
  CHECK(p.eval_episodes == 10);
  const RunConfig c = default_run_config("cstr");
  CHECK(c.actor_hidden == 8);
  CHECK(c.out_dir == "runs/cstr");
  CHECK_THROWS_AS(default_run_config("tank"), std::invalid_argument);
}

TEST_CASE("partial config documents merge onto the defaults") {
  const Json j = Json{{"env", "cstr"}, {"agent_cfg", Json{{"gamma", 0.95}}}};
  const RunConfig cfg = run_config_from_json(j);
  CHECK(cfg.env == "cstr");
  CHECK(cfg.actor_hidden == 8);
  CHECK(cfg.agent_cfg.gamma == 0.95);
  CHECK(cfg.agent_cfg.lr_actor == 1e-4);  // untouched default
  CHECK(cfg.cstr.safety_temp == 480.0);

  CHECK_THROWS_AS(run_config_from_json(Json{{"agent", "sac"}}), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(Json{{"agnet", "ddpg"}}), std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(Json{{"agent_cfg", Json{{"lr", 0.1}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_config_from_json(Json::array()), std::invalid_argument);
}

TEST_CASE("config hash is stable across a round trip and sensitive to fields") {
  const RunConfig cfg = default_run_config("pendulum");
  const std::string h = config_hash(cfg);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);

  const RunConfig back = run_config_from_json(Json::parse(Json(cfg).dump()));
  CHECK(config_hash(back) == h);

  RunConfig tweaked = cfg;
  tweaked.seed = 2;
  CHECK(config_hash(tweaked) != h);
  RunConfig other_env = default_run_config("cstr");
  CHECK(config_hash(other_env) != h);
}

TEST_CASE("dotted overrides reach nested fields and reject unknown paths") {
  RunConfig cfg = default_run_config("pendulum");
  apply_override(cfg, "agent_cfg.lr_actor", "0.0005");
  CHECK(cfg.agent_cfg.lr_actor == 0.0005);
  apply_override(cfg, "pendulum.steps_per_episode", "100");
  CHECK(cfg.pendulum.steps_per_episode == 100);
  apply_override(cfg, "seed", "42");
  CHECK(cfg.seed == 42);
  apply_override(cfg, "out_dir", "runs/elsewhere");   // not valid JSON: string
  CHECK(cfg.out_dir == "runs/elsewhere");
  apply_override(cfg, "out_dir", "123");  // parses as a number, field wants text
  CHECK(cfg.out_dir == "123");
  apply_override(cfg, "agent", "ddpg");
  CHECK(cfg.agent == "ddpg");

  // range checks live in make_agent; the config layer only guards structure
  apply_override(cfg, "agent_cfg.gamma", "0.95");
  CHECK(cfg.agent_cfg.gamma == 0.95);

  CHECK_THROWS_AS(apply_override(cfg, "agent_cfg.bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(cfg, "nonexistent", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(cfg, "agent", "sac"), std::invalid_argument);
}

TEST_CASE("fnv1a64 matches the published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("provenance block carries hash, seed, and versions") {
  const Json p = provenance("00ff00ff00ff00ff", 7);
  CHECK(p.at("config") == "00ff00ff00ff00ff");
  CHECK(p.at("seed") == 7);
  CHECK(p.at("toolkit") == kToolkitVersion);
  CHECK(p.at("format") == kFormatVersion);
}

TEST_CASE("training log csv matches the expected text exactly") {
  TrainingLog log;
  EpisodeStats e0;
  e0.episode = 0;
  e0.total_cost = 12.5;
  e0.violations = 0;
  e0.mean_critic_loss = 0.25;
  e0.mean_q = -3.5;
  EpisodeStats e1;
  e1.episode = 1;
  e1.total_cost = 8.0;
  e1.violations = 2;
  e1.mean_critic_loss = 0.125;
  e1.mean_q = -1.75;
  log.episodes = {e0, e1};
  const std::string expect =
      "# config=deadbeef00000000 seed=5\n"
      "episode,total_cost,violations,mean_critic_loss,mean_Q\n"
      "0,12.5,0,0.25,-3.5\n"
      "1,8,2,0.125,-1.75\n";
  CHECK(training_log_csv(log, "deadbeef00000000", 5) == expect);
  // determinism is the contract: same inputs, same bytes
  CHECK(training_log_csv(log, "deadbeef00000000", 5) ==
        training_log_csv(log, "deadbeef00000000", 5));
}

TEST_CASE("eval and trajectory csv emitters") {
  std::vector<EvalEpisode> eps(2);
  eps[0] = {4.5, 0, 200};
  eps[1] = {6.25, 1, 40};
  const std::string expect =
      "# config=aa seed=9\n"
      "episode,total_cost,violations,steps\n"
      "0,4.5,0,200\n"
      "1,6.25,1,40\n";
  CHECK(eval_episodes_csv(eps, "aa", 9) == expect);

  std::vector<TrajectoryStep> steps(2);
  steps[0] = {0.0, {0.5, -0.25}, {1.5}, 2.25, false};
  steps[1] = {0.05, {0.25, 0.125}, {-0.5}, 0.75, true};
  const std::string traj =
      "# config=aa seed=9\n"
      "t,state_0,state_1,action_0,cost,violation\n"
      "0,0.5,-0.25,1.5,2.25,0\n"
      "0.050000000000000003,0.25,0.125,-0.5,0.75,1\n";
  CHECK(trajectory_csv(steps, "aa", 9) == traj);
  CHECK_THROWS_AS(trajectory_csv({}, "aa", 9), std::invalid_argument);
}

TEST_CASE("benchmark report arithmetic and table") {
  std::vector<EvalEpisode> initial(3), final_evals(3);
  initial[0] = {10.0, 0, 200};
  initial[1] = {20.0, 1, 200};
  initial[2] = {30.0, 0, 150};
  final_evals[0] = {5.0, 0, 200};
  final_evals[1] = {10.0, 0, 200};
  final_evals[2] = {15.0, 2, 200};
  TrainingLog log;
  EpisodeStats e;
  e.violations = 3;
  log.episodes = {e, e};

  const BenchmarkReport r =
      make_benchmark_report("cstr", "yann-ddpg", initial, final_evals, log, "cafe", 11);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].episode == 1);
  CHECK(r.rows[2].episode == 3);
  CHECK(r.rows[1].change == -10.0);
  CHECK(r.initial_mean == 20.0);
  CHECK(r.final_mean == 10.0);
  CHECK(r.change_mean == -10.0);
  CHECK(r.train_violations == 6);
  CHECK(r.initial_eval_violations == 1);
  CHECK(r.final_eval_violations == 2);

  // averages recomputed from the rows they sit beside
  double mean_change = 0.0;
  for (const BenchmarkRow& row : r.rows) mean_change += row.change / 3.0;
  CHECK(r.change_mean == mean_change);

  const BenchmarkReport back = round_trip(r);
  CHECK(back.env == "cstr");
  CHECK(back.rows.size() == 3);
  CHECK(same_bits(back.final_mean, r.final_mean));
  CHECK(back.config_hash == "cafe");
  CHECK(back.seed == 11);

  const std::string table = benchmark_table(r);
  CHECK(table.find("Benchmark: cstr / yann-ddpg") != std::string::npos);
  CHECK(table.find("Episode") != std::string::npos);
  CHECK(table.find("Initial") != std::string::npos);
  CHECK(table.find("Final") != std::string::npos);
  CHECK(table.find("Change") != std::string::npos);
  CHECK(table.find("Average") != std::string::npos);
  CHECK(table.find("Safety violations: training 6") != std::string::npos);

  const BenchmarkReport swing =
      make_benchmark_report("pendulum", "ddpg", initial, final_evals, log, "cafe", 11);
  CHECK(benchmark_table(swing).find("Safety violations") == std::string::npos);

  std::vector<EvalEpisode> short_set(2);
  CHECK_THROWS_AS(make_benchmark_report("cstr", "ddpg", initial, short_set, log, "c", 1),
                  std::invalid_argument);
}

TEST_CASE("file helpers write, read, and reject bad json") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "yannrl_serialize_test";
  fs::remove_all(dir);

  const std::string path = (dir / "nested" / "cfg.json").string();
  const RunConfig cfg = default_run_config("cstr");
  save_json_file(path, Json(cfg));
  const RunConfig loaded = load_run_config(path);
  CHECK(config_hash(loaded) == config_hash(cfg));
  CHECK(loaded.actor_hidden == 8);

  const std::string text_path = (dir / "note.txt").string();
  write_text_file(text_path, "alpha\nbeta\n");
  CHECK(read_text_file(text_path) == "alpha\nbeta\n");

  const std::string bad = (dir / "bad.json").string();
  write_text_file(bad, "{not json");
  CHECK_THROWS_AS(load_json_file(bad), std::invalid_argument);
  CHECK_THROWS_AS(read_text_file((dir / "missing.json").string()), std::invalid_argument);

  fs::remove_all(dir);
}
