#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "yannrl/envs.hpp"
#include "yannrl/mpc.hpp"
#include "yannrl/mpqp.hpp"
#include "yannrl/net.hpp"
#include "yannrl/rl.hpp"

namespace yannrl {

using Json = nlohmann::json;

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

// ADL hooks; `Json j = value` and `j.get<T>()` work for all of these.
// Doubles survive a dump/parse cycle bit for bit (shortest round-trip
// formatting), which the weight files rely on.
void to_json(Json& j, const Matrix& m);
void from_json(const Json& j, Matrix& m);
void to_json(Json& j, const Polytope& p);
void from_json(const Json& j, Polytope& p);
void to_json(Json& j, const Layer& l);
void from_json(const Json& j, Layer& l);
// Throws NumericError on non-finite parameters; validates wiring on load.
void to_json(Json& j, const LayeredNetwork& n);
void from_json(const Json& j, LayeredNetwork& n);
void to_json(Json& j, const PwaRegion& r);
void from_json(const Json& j, PwaRegion& r);
void to_json(Json& j, const PwaLaw& law);
void from_json(const Json& j, PwaLaw& law);
void to_json(Json& j, const MpqpRegion& r);
void from_json(const Json& j, MpqpRegion& r);
void to_json(Json& j, const MpqpSolution& s);
void from_json(const Json& j, MpqpSolution& s);
void to_json(Json& j, const MpcDesign& d);
void from_json(const Json& j, MpcDesign& d);

// Config sections merge onto the values already in the target, so partial
// documents override only what they mention; unknown keys are rejected.
// AgentConfig.seed never serializes: runs derive it from the master seed.
void to_json(Json& j, const AgentConfig& c);
void from_json(const Json& j, AgentConfig& c);
void to_json(Json& j, const PendulumParams& p);
void from_json(const Json& j, PendulumParams& p);
void to_json(Json& j, const CstrParams& p);
void from_json(const Json& j, CstrParams& p);

// One JSON document drives a whole experiment; see default_run_config for
// the per-environment defaults.
struct RunConfig {
  std::string env = "pendulum";     // pendulum | cstr
  std::string agent = "yann-ddpg";  // yann-ddpg | ddpg
  AgentConfig agent_cfg{};
  std::size_t actor_hidden = 16;   // correction units per (region, output)
  std::size_t critic_hidden = 64;  // critic zero-block width
  double zero_init_scale = 0.01;
  std::size_t mlp_hidden = 256;  // baseline network width
  int train_episodes = 50;
  int eval_episodes = 10;
  std::string out_dir = "runs/pendulum";
  std::uint64_t seed = 1;  // master seed; every stream derives from it
  PendulumParams pendulum{};
  CstrParams cstr{};
};

// Throws std::invalid_argument for an unregistered environment name.
RunConfig default_run_config(const std::string& env);

void to_json(Json& j, const RunConfig& c);
void from_json(const Json& j, RunConfig& c);

// Starts from default_run_config(j["env"]) and merges j onto it.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::string& path);

// Dotted-path field override ("agent_cfg.lr_actor", "pendulum.dt", "seed").
// The value parses as JSON when it can, else it is taken as a string.
// Unknown paths throw std::invalid_argument.
void apply_override(RunConfig& cfg, const std::string& dotted_path, const std::string& value);

std::uint64_t fnv1a64(const std::string& bytes);

// 16 hex digits over the canonical (sorted-key) dump of the config.
std::string config_hash(const RunConfig& cfg);

// {"config": hash, "seed": ..., "toolkit": ..., "format": ...}; embedded in
// every artifact this toolkit writes.
Json provenance(const std::string& config_hash, std::uint64_t seed);

// File helpers create parent directories and throw std::invalid_argument on
// IO or parse failure (the CLI maps that to its config-error exit).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);
Json load_json_file(const std::string& path);

// Shortest exact decimal for a double (17 significant digits).
std::string csv_number(double v);

// CSV emitters. Each starts with "# config=<hash> seed=<seed>" followed by a
// header row; identical inputs produce byte-identical text.
std::string training_log_csv(const TrainingLog& log, const std::string& config_hash,
                             std::uint64_t seed);
std::string eval_episodes_csv(const std::vector<EvalEpisode>& eps, const std::string& config_hash,
                              std::uint64_t seed);

struct TrajectoryStep {
  double t = 0.0;
  Vec state;
  Vec action;
  double cost = 0.0;
  bool violated = false;
};

std::string trajectory_csv(const std::vector<TrajectoryStep>& steps,
                           const std::string& config_hash, std::uint64_t seed);

struct BenchmarkRow {
  int episode = 0;
  double initial = 0.0;
  double final_cost = 0.0;
  double change = 0.0;  // final - initial
};

// Paired before/after evaluation of one agent on the fixed episode set.
struct BenchmarkReport {
  std::string env, agent;
  std::vector<BenchmarkRow> rows;
  double initial_mean = 0.0, final_mean = 0.0, change_mean = 0.0;
  int train_violations = 0;
  int initial_eval_violations = 0;
  int final_eval_violations = 0;
  std::string config_hash;
  std::uint64_t seed = 0;
};

BenchmarkReport make_benchmark_report(const std::string& env, const std::string& agent,
                                      const std::vector<EvalEpisode>& initial,
                                      const std::vector<EvalEpisode>& final_evals,
                                      const TrainingLog& log, const std::string& config_hash,
                                      std::uint64_t seed);

void to_json(Json& j, const BenchmarkReport& r);
void from_json(const Json& j, BenchmarkReport& r);

// Aligned text table: one row per episode plus an Average row; reports for
// the reactor append the safety-violation counts.
std::string benchmark_table(const BenchmarkReport& r);

}  // namespace yannrl
