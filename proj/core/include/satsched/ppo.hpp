#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satsched/architect.hpp"
#include "satsched/cusum.hpp"
#include "satsched/env.hpp"
#include "satsched/events.hpp"
#include "satsched/nets.hpp"
#include "satsched/reward.hpp"

namespace satsched {

struct PpoConfig {
  double lr = 3e-4;
  double clip_epsilon = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  // Short rollouts trade GAE horizon for update count; desk-scale runs of
  // 20-50k steps need the updates far more than the horizon.
  int rollout_len = 256;
  int minibatch = 64;
  int epochs_per_update = 10;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::uint64_t total_steps = 50000;
  // Internal scaling applied to rewards before GAE so value targets stay O(1);
  // logged metrics always carry the raw composite reward.
  double reward_scale = 0.01;
  // Starting scale of the logit-space exploration noise; learned from there.
  double initial_action_std = 0.5;
  std::vector<int> hidden = {256, 256, 128};

  bool operator==(const PpoConfig&) const = default;
};

// Shared trunk with a logits head over num_beams+1 components (the extra
// slack component absorbs unallocated bandwidth), a scalar value head and a
// learned per-component exploration std for the logit-space noise.
struct PolicyNet {
  Mlp trunk;
  Mlp pi_head;   // single linear layer
  Mlp v_head;    // single linear layer
  Mlp log_std;   // bias-only layer (in = 0): state-independent noise scale
  int num_actions = 0;  // num_beams + 1

  static PolicyNet make(int obs_dim, int num_beams, const std::vector<int>& hidden,
                        std::uint64_t seed, double initial_std = 1.0);

  void forward(std::span<const double> obs, std::vector<double>& logits, double& value) const;
  std::vector<double> log_std_clamped() const;

  std::string to_json() const;
  static PolicyNet from_json(const std::string& text);
  void save(const std::string& path) const;
  static PolicyNet load(const std::string& path);
};

// Exploration std bounds: wide enough to explore, floored so the density
// never degenerates.
inline constexpr double kLogStdMin = -2.5;
inline constexpr double kLogStdMax = 1.0;

struct ActionSample {
  std::vector<double> simplex;      // softmax point, sums to 1
  std::vector<double> pre_softmax;  // the sampled logit-space action u
  double log_prob = 0.0;
  double value = 0.0;
};

// Actions are softmax(u) where u = logits + sigma * eps in logit space; the
// density is the exact diagonal Gaussian over u, so PPO ratios are simple and
// the policy can anneal its own exploration. Deterministic mode returns the
// softmax of the logits. The environment consumes the first num_beams
// components, so the allocation always sums to <= 1.
ActionSample sample_action(const PolicyNet& net, std::span<const double> obs, Rng& rng,
                           bool stochastic);

// Diagonal-Gaussian log density of u given (logits, clamped log stds), with
// optional gradients with respect to the logits and the raw log-std params.
double action_log_prob(std::span<const double> logits, std::span<const double> log_std_raw,
                       std::span<const double> u, std::vector<double>* dlogp_dlogits = nullptr,
                       std::vector<double>* dlogp_dlogstd = nullptr);

// Generalized advantage estimation over one rollout (continuing task, no
// terminals). Returns are advantages + values.
void gae(std::span<const double> rewards, std::span<const double> values, double bootstrap_value,
         double gamma, double lambda, std::vector<double>& advantages,
         std::vector<double>& returns);

// In-place zero-mean unit-variance normalization applied once per update.
void normalize_advantages(std::vector<double>& advantages);

struct RolloutBuffer {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> pre_softmax;
  std::vector<double> old_log_prob;
  std::vector<double> rewards;  // already reward-scaled
  std::vector<double> values;
  std::vector<double> advantages;
  std::vector<double> returns;
  double bootstrap_value = 0.0;

  std::size_t size() const { return rewards.size(); }
  void clear();
};

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

// Mean loss over the indexed samples (clipped surrogate + value MSE -
// entropy bonus) with parameter gradients accumulated into the four grad
// sets; exactly what one minibatch Adam step consumes. `advantages` and
// `returns` must already be filled. Exposed so gradient checks can pit the
// backward pass against finite differences.
double ppo_loss_and_grads(const PolicyNet& net, const RolloutBuffer& rollout,
                          std::span<const std::size_t> indices, const PpoConfig& cfg,
                          std::vector<LayerGrads>* trunk_grads,
                          std::vector<LayerGrads>* pi_grads, std::vector<LayerGrads>* v_grads,
                          std::vector<LayerGrads>* std_grads, LossStats* stats = nullptr,
                          std::size_t* clipped = nullptr);

// One PPO update: clipped surrogate + value MSE + entropy bonus, Adam steps
// over shuffled minibatches. Throws on non-finite loss.
LossStats ppo_update(PolicyNet& net, Adam& opt, RolloutBuffer& rollout, const PpoConfig& cfg,
                     Rng& rng);

struct SwitchEvent {
  std::uint64_t step = 0;
  WeightVector from, to;
};

// Per-run record: full per-step series plus aggregates.
struct RunMetrics {
  std::uint64_t seed = 0;
  std::string architect;
  std::vector<double> sum_rate_mbps;
  std::vector<double> outage_count;
  std::vector<double> fairness;
  std::vector<double> switching_cost;
  std::vector<double> reward;  // raw composite reward
  std::vector<std::array<double, kNumWeights>> weight_trajectory;
  std::vector<SwitchEvent> switches;

  struct RegimeAggregate {
    std::string regime;
    double mean_rate_mbps = 0.0;
    double mean_outage = 0.0;
    double mean_fairness = 0.0;
    std::uint64_t steps = 0;
  };
  std::vector<RegimeAggregate> per_regime;

  double mean_rate_mbps = 0.0;
  double final_window_rate_mbps = 0.0;  // last 10%
  double mean_outage = 0.0;
  double mean_fairness = 0.0;
  double mean_reward = 0.0;
  double final_window_reward = 0.0;

  void finalize();
  std::string to_json() const;          // aggregates + config echo
  std::string trace_jsonl() const;      // one line per step
};

using EnvFactory = std::function<std::unique_ptr<Env>(std::uint64_t seed)>;

struct TrainOptions {
  PpoConfig ppo;
  CusumConfig cusum;
  WeightVector initial_weights;
  bool detector_enabled = true;
  // Query the architect on a fixed cadence as well as on alarms (0 = off);
  // the dilemma presets use this to pin switch times to regime boundaries.
  std::uint64_t forced_architect_period = 0;
  // Explicit consult steps (sorted), used for intent phase boundaries.
  std::vector<std::uint64_t> forced_consult_steps;
  double switch_threshold_linf = 0.01;
  std::string config_echo;  // verbatim JSON embedded in reports
  std::string save_policy_path;  // final checkpoint, written when non-empty
};

// Fast-timescale loop: acts, steps the environment, composes the reward under
// the currently applied weights, feeds the CUSUM monitor, and consults the
// architect at alarms. `architect` may be null (weights stay at
// initial_weights). Throttle wrappers additionally shape the applied weights
// every step through weights_at().
RunMetrics train(const EnvFactory& make_env, Architect* architect, const TrainOptions& opts,
                 std::uint64_t seed, EventLog* log = nullptr);

// Same loop with actions drawn from uniform logits; the no-learning baseline.
RunMetrics random_policy_run(const EnvFactory& make_env, const TrainOptions& opts,
                             std::uint64_t seed);

}  // namespace satsched
