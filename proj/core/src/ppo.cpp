#include "satsched/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace satsched {

namespace {
double log_sum_exp(std::span<const double> v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}
}  // namespace

PolicyNet PolicyNet::make(int obs_dim, int num_beams, const std::vector<int>& hidden,
                          std::uint64_t seed, double initial_std) {
  PolicyNet net;
  net.num_actions = num_beams + 1;  // slack component
  std::vector<int> trunk_sizes = {obs_dim};
  trunk_sizes.insert(trunk_sizes.end(), hidden.begin(), hidden.end());
  net.trunk = Mlp(trunk_sizes, Activation::relu, Activation::relu);
  net.pi_head = Mlp({hidden.back(), net.num_actions}, Activation::identity, Activation::identity);
  net.v_head = Mlp({hidden.back(), 1}, Activation::identity, Activation::identity);
  net.log_std.layers.emplace_back(0, net.num_actions, Activation::identity);

  Rng rng(Rng::mix(seed, 0x90110e7));
  net.trunk.init(rng);
  net.pi_head.init(rng);
  net.v_head.init(rng);
  // Small initial logits keep the starting policy near uniform.
  for (auto& w : net.pi_head.layers[0].w) w *= 0.01;
  const double ls = std::log(std::max(1e-6, initial_std));
  std::fill(net.log_std.layers[0].b.begin(), net.log_std.layers[0].b.end(), ls);
  return net;
}

void PolicyNet::forward(std::span<const double> obs, std::vector<double>& logits,
                        double& value) const {
  const auto h = trunk.forward(obs);
  logits = pi_head.forward(h);
  value = v_head.forward(h)[0];
}

std::vector<double> PolicyNet::log_std_clamped() const {
  std::vector<double> out(log_std.layers[0].b);
  for (auto& v : out) v = std::clamp(v, kLogStdMin, kLogStdMax);
  return out;
}

std::string PolicyNet::to_json() const {
  nlohmann::json j;
  j["num_actions"] = num_actions;
  j["trunk"] = nlohmann::json::parse(trunk.to_json());
  j["pi_head"] = nlohmann::json::parse(pi_head.to_json());
  j["v_head"] = nlohmann::json::parse(v_head.to_json());
  j["log_std"] = log_std.layers[0].b;
  return j.dump();
}

PolicyNet PolicyNet::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PolicyNet net;
  net.num_actions = j.at("num_actions").get<int>();
  net.trunk = Mlp::from_json(j.at("trunk").dump());
  net.pi_head = Mlp::from_json(j.at("pi_head").dump());
  net.v_head = Mlp::from_json(j.at("v_head").dump());
  net.log_std.layers.emplace_back(0, net.num_actions, Activation::identity);
  net.log_std.layers[0].b = j.at("log_std").get<std::vector<double>>();
  if (net.log_std.layers[0].b.size() != static_cast<std::size_t>(net.num_actions)) {
    throw std::invalid_argument("log_std size mismatch");
  }
  return net;
}

void PolicyNet::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write policy: " + path);
  f << to_json();
}

PolicyNet PolicyNet::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read policy: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

double action_log_prob(std::span<const double> logits, std::span<const double> log_std_raw,
                       std::span<const double> u, std::vector<double>* dlogp_dlogits,
                       std::vector<double>* dlogp_dlogstd) {
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  const std::size_t n = logits.size();
  double logp = 0.0;
  if (dlogp_dlogits) dlogp_dlogits->resize(n);
  if (dlogp_dlogstd) dlogp_dlogstd->resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ls = std::clamp(log_std_raw[k], kLogStdMin, kLogStdMax);
    const double inv_var = std::exp(-2.0 * ls);
    const double diff = u[k] - logits[k];
    logp += -0.5 * diff * diff * inv_var - ls - kHalfLog2Pi;
    if (dlogp_dlogits) (*dlogp_dlogits)[k] = diff * inv_var;
    if (dlogp_dlogstd) {
      const bool interior = log_std_raw[k] > kLogStdMin && log_std_raw[k] < kLogStdMax;
      (*dlogp_dlogstd)[k] = interior ? diff * diff * inv_var - 1.0 : 0.0;
    }
  }
  return logp;
}

ActionSample sample_action(const PolicyNet& net, std::span<const double> obs, Rng& rng,
                           bool stochastic) {
  ActionSample sample;
  std::vector<double> logits;
  net.forward(obs, logits, sample.value);
  for (double l : logits) {
    if (!std::isfinite(l)) throw std::runtime_error("policy produced non-finite logits");
  }

  const std::size_t n = logits.size();
  sample.pre_softmax.resize(n);
  if (stochastic) {
    const auto ls = net.log_std_clamped();
    for (std::size_t k = 0; k < n; ++k) {
      sample.pre_softmax[k] = logits[k] + std::exp(ls[k]) * rng.normal();
    }
    sample.log_prob = action_log_prob(logits, net.log_std.layers[0].b, sample.pre_softmax,
                                      nullptr, nullptr);
  } else {
    for (std::size_t k = 0; k < n; ++k) sample.pre_softmax[k] = logits[k];
  }

  const double lse = log_sum_exp(sample.pre_softmax);
  sample.simplex.resize(n);
  for (std::size_t k = 0; k < n; ++k) sample.simplex[k] = std::exp(sample.pre_softmax[k] - lse);
  return sample;
}

void gae(std::span<const double> rewards, std::span<const double> values, double bootstrap_value,
         double gamma, double lambda, std::vector<double>& advantages,
         std::vector<double>& returns) {
  if (rewards.size() != values.size()) throw std::invalid_argument("gae: length mismatch");
  const std::size_t n = rewards.size();
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_v = (i + 1 < n) ? values[i + 1] : bootstrap_value;
    const double delta = rewards[i] + gamma * next_v - values[i];
    running = delta + gamma * lambda * running;
    advantages[i] = running;
    returns[i] = advantages[i] + values[i];
  }
}

void normalize_advantages(std::vector<double>& advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / n);
  const double denom = std > 1e-8 ? std : 1.0;
  for (double& a : advantages) a = (a - mean) / denom;
}

void RolloutBuffer::clear() {
  obs.clear();
  pre_softmax.clear();
  old_log_prob.clear();
  rewards.clear();
  values.clear();
  advantages.clear();
  returns.clear();
  bootstrap_value = 0.0;
}

double ppo_loss_and_grads(const PolicyNet& net, const RolloutBuffer& rollout,
                          std::span<const std::size_t> indices, const PpoConfig& cfg,
                          std::vector<LayerGrads>* trunk_grads,
                          std::vector<LayerGrads>* pi_grads, std::vector<LayerGrads>* v_grads,
                          std::vector<LayerGrads>* std_grads, LossStats* stats,
                          std::size_t* clipped) {
  if (indices.empty()) throw std::invalid_argument("ppo_loss_and_grads: empty minibatch");
  Mlp::Cache trunk_cache, pi_cache, v_cache;
  const double inv_batch = 1.0 / static_cast<double>(indices.size());
  const auto& log_std_raw = net.log_std.layers[0].b;
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double total_loss = 0.0;

  for (const std::size_t s : indices) {
    net.trunk.forward_cached(rollout.obs[s], trunk_cache);
    net.pi_head.forward_cached(trunk_cache.output, pi_cache);
    net.v_head.forward_cached(trunk_cache.output, v_cache);
    const auto& logits = pi_cache.output;
    const double value = v_cache.output[0];
    const std::size_t na = logits.size();

    std::vector<double> dlogp_dl, dlogp_dls;
    const double logp = action_log_prob(logits, log_std_raw, rollout.pre_softmax[s], &dlogp_dl,
                                        &dlogp_dls);
    const double ratio = std::exp(logp - rollout.old_log_prob[s]);
    const double adv = rollout.advantages[s];
    const double clipped_ratio =
        std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
    const double surr_unclipped = ratio * adv;
    const double surr_clipped = clipped_ratio * adv;
    const bool use_unclipped = surr_unclipped <= surr_clipped;
    const double policy_loss = -std::min(surr_unclipped, surr_clipped);
    const double dpolicy_dlogp = use_unclipped ? -adv * ratio : 0.0;
    if (!use_unclipped && clipped) ++(*clipped);

    // Gaussian policy entropy: sum of log sigma plus a constant.
    double entropy = 0.0;
    for (std::size_t c = 0; c < na; ++c) {
      entropy += std::clamp(log_std_raw[c], kLogStdMin, kLogStdMax) + 0.5 + kHalfLog2Pi;
    }

    const double verr = value - rollout.returns[s];
    const double value_loss = 0.5 * verr * verr;
    const double sample_loss =
        policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy;
    if (!std::isfinite(sample_loss)) {
      std::ostringstream msg;
      msg << "ppo loss is not finite (policy=" << policy_loss << ", value=" << value_loss
          << ", entropy=" << entropy << ", ratio=" << ratio << ")";
      throw std::runtime_error(msg.str());
    }
    total_loss += sample_loss * inv_batch;

    if (trunk_grads) {
      std::vector<double> dlogits(na);
      for (std::size_t c = 0; c < na; ++c) {
        dlogits[c] = dpolicy_dlogp * dlogp_dl[c] * inv_batch;
      }
      const std::vector<double> dvalue = {cfg.value_coef * verr * inv_batch};

      auto dh_pi = net.pi_head.backward(pi_cache, dlogits, *pi_grads);
      auto dh_v = net.v_head.backward(v_cache, dvalue, *v_grads);
      for (std::size_t c = 0; c < dh_pi.size(); ++c) dh_pi[c] += dh_v[c];
      net.trunk.backward(trunk_cache, dh_pi, *trunk_grads);

      auto& std_bias_grads = (*std_grads)[0].db;
      for (std::size_t c = 0; c < na; ++c) {
        const bool interior = log_std_raw[c] > kLogStdMin && log_std_raw[c] < kLogStdMax;
        std_bias_grads[c] += dpolicy_dlogp * dlogp_dls[c] * inv_batch -
                             cfg.entropy_coef * (interior ? 1.0 : 0.0) * inv_batch;
      }
    }

    if (stats) {
      stats->policy_loss += policy_loss;
      stats->value_loss += value_loss;
      stats->entropy += entropy;
      stats->approx_kl += rollout.old_log_prob[s] - logp;
    }
  }
  return total_loss;
}

LossStats ppo_update(PolicyNet& net, Adam& opt, RolloutBuffer& rollout, const PpoConfig& cfg,
                     Rng& rng) {
  const std::size_t n = rollout.size();
  if (n == 0) throw std::invalid_argument("ppo_update: empty rollout");

  gae(rollout.rewards, rollout.values, rollout.bootstrap_value, cfg.gamma, cfg.gae_lambda,
      rollout.advantages, rollout.returns);
  normalize_advantages(rollout.advantages);

  auto trunk_grads = net.trunk.make_grads();
  auto pi_grads = net.pi_head.make_grads();
  auto v_grads = net.v_head.make_grads();
  auto std_grads = net.log_std.make_grads();

  LossStats stats;
  std::size_t samples_seen = 0, clipped_seen = 0;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_int(i)]);

    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.minibatch)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.minibatch));
      Mlp::zero_grads(trunk_grads);
      Mlp::zero_grads(pi_grads);
      Mlp::zero_grads(v_grads);
      Mlp::zero_grads(std_grads);
      ppo_loss_and_grads(net, rollout,
                         std::span<const std::size_t>(idx).subspan(start, end - start), cfg,
                         &trunk_grads, &pi_grads, &v_grads, &std_grads, &stats, &clipped_seen);
      samples_seen += end - start;
      opt.step({&trunk_grads, &pi_grads, &v_grads, &std_grads});
    }
  }

  const double inv = 1.0 / static_cast<double>(samples_seen);
  stats.policy_loss *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.approx_kl *= inv;
  stats.clip_fraction = static_cast<double>(clipped_seen) / static_cast<double>(samples_seen);
  return stats;
}

void RunMetrics::finalize() {
  const std::size_t n = sum_rate_mbps.size();
  if (n == 0) return;
  auto mean_of = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  mean_rate_mbps = mean_of(sum_rate_mbps);
  mean_outage = mean_of(outage_count);
  mean_fairness = mean_of(fairness);
  mean_reward = mean_of(reward);

  const std::size_t tail = std::max<std::size_t>(1, n / 10);
  auto tail_mean = [&](const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = v.size() - tail; i < v.size(); ++i) acc += v[i];
    return acc / static_cast<double>(tail);
  };
  final_window_rate_mbps = tail_mean(sum_rate_mbps);
  final_window_reward = tail_mean(reward);
}

std::string RunMetrics::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["architect"] = architect;
  j["steps"] = sum_rate_mbps.size();
  j["mean_rate_mbps"] = mean_rate_mbps;
  j["final_window_rate_mbps"] = final_window_rate_mbps;
  j["mean_outage"] = mean_outage;
  j["mean_fairness"] = mean_fairness;
  j["mean_reward"] = mean_reward;
  j["final_window_reward"] = final_window_reward;
  j["switch_count"] = switches.size();
  j["switches"] = nlohmann::json::array();
  for (const auto& s : switches) {
    j["switches"].push_back({{"step", s.step},
                             {"from", nlohmann::json::parse(to_json_array(s.from))},
                             {"to", nlohmann::json::parse(to_json_array(s.to))}});
  }
  j["per_regime"] = nlohmann::json::array();
  for (const auto& r : per_regime) {
    j["per_regime"].push_back({{"regime", r.regime},
                               {"mean_rate_mbps", r.mean_rate_mbps},
                               {"mean_outage", r.mean_outage},
                               {"mean_fairness", r.mean_fairness},
                               {"steps", r.steps}});
  }
  return j.dump(2);
}

std::string RunMetrics::trace_jsonl() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < sum_rate_mbps.size(); ++i) {
    nlohmann::json j;
    j["step"] = i;
    j["rate_mbps"] = sum_rate_mbps[i];
    j["outage"] = outage_count[i];
    j["fairness"] = fairness[i];
    j["reward"] = reward[i];
    j["weights"] = weight_trajectory[i];
    out << j.dump() << "\n";
  }
  return out.str();
}

namespace {

struct RegimeAccumulator {
  double rate = 0.0, outage = 0.0, fair = 0.0;
  std::uint64_t steps = 0;
};

class WeightPlan {
 public:
  WeightPlan(Architect* architect, WeightVector initial, double switch_threshold)
      : architect_(architect), applied_(clamp_weights(initial)), threshold_(switch_threshold) {
    throttle_ = dynamic_cast<ThrottleInterpolate*>(architect);
  }

  // Per-step applied weights; under a throttle wrapper they move every step.
  WeightVector at_step(std::uint64_t step) {
    if (throttle_) maybe_switch(throttle_->weights_at(step), step);
    return applied_;
  }

  void consult(const KpiSnapshot& kpi, std::uint64_t effective_step, Rng& rng) {
    if (!architect_) return;
    const WeightVector proposal = architect_->propose(kpi, effective_step, rng);
    if (!throttle_) maybe_switch(proposal, effective_step);
  }

  const std::vector<SwitchEvent>& switches() const { return switches_; }

 private:
  void maybe_switch(const WeightVector& next, std::uint64_t step) {
    if (linf_distance(next, applied_) > threshold_) {
      switches_.push_back({step, applied_, next});
    }
    applied_ = next;
  }

  Architect* architect_;
  ThrottleInterpolate* throttle_;
  WeightVector applied_;
  double threshold_;
  std::vector<SwitchEvent> switches_;
};

RunMetrics run_loop(const EnvFactory& make_env, Architect* architect, const TrainOptions& opts,
                    std::uint64_t seed, EventLog* log, bool learn) {
  auto env = make_env(seed);
  const int nb = env->num_beams();
  const int obs_dim = env->observation_dim();
  const PpoConfig& cfg = opts.ppo;

  PolicyNet net = PolicyNet::make(obs_dim, nb, cfg.hidden, seed, cfg.initial_action_std);
  Adam opt(cfg.lr);
  opt.register_net(net.trunk);
  opt.register_net(net.pi_head);
  opt.register_net(net.v_head);
  opt.register_net(net.log_std);

  Rng act_rng(Rng::mix(seed, 0xac7105));
  Rng update_rng(Rng::mix(seed, 0x0bda7e));
  RegimeMonitor monitor(opts.cusum, log);
  WeightPlan plan(architect, opts.initial_weights, opts.switch_threshold_linf);

  RunMetrics metrics;
  metrics.seed = seed;
  metrics.architect = architect ? architect->name() : (learn ? "none" : "random");
  metrics.sum_rate_mbps.reserve(cfg.total_steps);

  RolloutBuffer buf;
  std::vector<double> obs;
  std::vector<double> zero_logits;
  std::map<std::string, RegimeAccumulator> regime_acc;

  for (std::uint64_t t = 0; t < cfg.total_steps; ++t) {
    const WeightVector applied = plan.at_step(t);
    env->observe(obs);
    const std::string regime = regime_name(env->current_regime());

    ActionSample a;
    if (learn) {
      a = sample_action(net, obs, act_rng, true);
    } else {
      // Uniform-random policy: zero logits, unit noise.
      if (zero_logits.empty()) zero_logits.assign(static_cast<std::size_t>(nb + 1), 0.0);
      a.pre_softmax.resize(zero_logits.size());
      for (std::size_t k = 0; k < a.pre_softmax.size(); ++k) {
        a.pre_softmax[k] = act_rng.normal();
      }
      const double lse = log_sum_exp(a.pre_softmax);
      a.simplex.resize(a.pre_softmax.size());
      for (std::size_t k = 0; k < a.pre_softmax.size(); ++k) {
        a.simplex[k] = std::exp(a.pre_softmax[k] - lse);
      }
    }

    const StepResult sr = env->step(std::span<const double>(a.simplex).first(nb));
    const double reward_raw = compose(applied, sr.terms);

    metrics.sum_rate_mbps.push_back(sr.sum_rate_mbps);
    metrics.outage_count.push_back(sr.terms.outage_count);
    metrics.fairness.push_back(sr.terms.fairness);
    metrics.switching_cost.push_back(sr.terms.switching);
    metrics.reward.push_back(reward_raw);
    std::array<double, kNumWeights> wrow{};
    for (std::size_t i = 0; i < kNumWeights; ++i) wrow[i] = applied[i];
    metrics.weight_trajectory.push_back(wrow);

    auto& acc = regime_acc[regime];
    acc.rate += sr.sum_rate_mbps;
    acc.outage += sr.terms.outage_count;
    acc.fair += sr.terms.fairness;
    acc.steps += 1;

    if (learn) {
      buf.obs.push_back(obs);
      buf.pre_softmax.push_back(a.pre_softmax);
      buf.old_log_prob.push_back(a.log_prob);
      buf.rewards.push_back(reward_raw * cfg.reward_scale);
      buf.values.push_back(a.value);

      if (static_cast<int>(buf.size()) >= cfg.rollout_len) {
        env->observe(obs);
        std::vector<double> next_logits;
        double next_value = 0.0;
        net.forward(obs, next_logits, next_value);
        buf.bootstrap_value = next_value;
        ppo_update(net, opt, buf, cfg, update_rng);
        buf.clear();
      }
    }

    // Slow timescale: consult the architect when the detector fires (or on
    // the forced cadence used by the dilemma presets); new weights take
    // effect from the next step.
    bool consult = false;
    if (opts.detector_enabled) {
      if (monitor.update(sr.kpi, t)) consult = true;
    }
    const std::uint64_t next = t + 1;
    if (opts.forced_architect_period > 0 && next % opts.forced_architect_period == 0) {
      consult = true;
    }
    if (!opts.forced_consult_steps.empty() &&
        std::binary_search(opts.forced_consult_steps.begin(), opts.forced_consult_steps.end(),
                           next)) {
      consult = true;
    }
    if (consult) plan.consult(sr.kpi, next, act_rng);
  }

  if (learn && !opts.save_policy_path.empty()) net.save(opts.save_policy_path);

  metrics.switches = plan.switches();
  for (const auto& [name, acc] : regime_acc) {
    RunMetrics::RegimeAggregate agg;
    agg.regime = name;
    agg.steps = acc.steps;
    const double inv = acc.steps > 0 ? 1.0 / static_cast<double>(acc.steps) : 0.0;
    agg.mean_rate_mbps = acc.rate * inv;
    agg.mean_outage = acc.outage * inv;
    agg.mean_fairness = acc.fair * inv;
    metrics.per_regime.push_back(agg);
  }
  metrics.finalize();
  return metrics;
}

}  // namespace

RunMetrics train(const EnvFactory& make_env, Architect* architect, const TrainOptions& opts,
                 std::uint64_t seed, EventLog* log) {
  return run_loop(make_env, architect, opts, seed, log, true);
}

RunMetrics random_policy_run(const EnvFactory& make_env, const TrainOptions& opts,
                             std::uint64_t seed) {
  return run_loop(make_env, nullptr, opts, seed, nullptr, false);
}

}  // namespace satsched
