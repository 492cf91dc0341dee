#include "satsched/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace satsched {

using nlohmann::json;

const char* architect_kind_name(ArchitectKind k) {
  switch (k) {
    case ArchitectKind::fixed: return "fixed";
    case ArchitectKind::rule: return "rule";
    case ArchitectKind::mlp: return "mlp";
    case ArchitectKind::osc_llm: return "osc_llm";
    case ArchitectKind::llm_api: return "llm_api";
    case ArchitectKind::schedule_oracle: return "schedule_oracle";
  }
  return "fixed";
}

ArchitectKind architect_kind_from_string(const std::string& name) {
  for (auto k : {ArchitectKind::fixed, ArchitectKind::rule, ArchitectKind::mlp,
                 ArchitectKind::osc_llm, ArchitectKind::llm_api, ArchitectKind::schedule_oracle}) {
    if (name == architect_kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown architect kind: " + name);
}

namespace {

const char* guard_kind_name(GuardKind g) {
  switch (g) {
    case GuardKind::none: return "none";
    case GuardKind::cooldown: return "cooldown";
    case GuardKind::throttle: return "throttle";
  }
  return "none";
}

GuardKind guard_kind_from_string(const std::string& name) {
  for (auto g : {GuardKind::none, GuardKind::cooldown, GuardKind::throttle}) {
    if (name == guard_kind_name(g)) return g;
  }
  throw std::invalid_argument("unknown guard kind: " + name);
}

json weights_to_json(const WeightVector& w) {
  json arr = json::array();
  for (std::size_t i = 0; i < kNumWeights; ++i) arr.push_back(w[i]);
  return arr;
}

WeightVector weights_from_json(const json& arr, const std::string& where,
                               std::vector<std::string>& errors) {
  WeightVector w;
  if (!arr.is_array() || arr.size() != kNumWeights) {
    errors.push_back(where + ": expected a 5-element array");
    return w;
  }
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    if (!arr[i].is_number()) {
      errors.push_back(where + ": entries must be numbers");
      return w;
    }
    w[i] = arr[i].get<double>();
  }
  return w;
}

// Reads known fields out of `j`, collecting unknown keys into warnings.
class Reader {
 public:
  Reader(const json& j, std::string prefix, std::vector<std::string>& warnings,
         std::vector<std::string>& errors)
      : j_(j), prefix_(std::move(prefix)), warnings_(warnings), errors_(errors) {}

  template <typename T>
  void get(const char* key, T& out) {
    known_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      errors_.push_back(prefix_ + key + ": wrong type");
    }
  }

  void get_weights(const char* key, WeightVector& out) {
    known_.push_back(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    out = weights_from_json(*it, prefix_ + key, errors_);
  }

  bool has(const char* key) {
    known_.push_back(key);
    return j_.contains(key);
  }

  const json& sub(const char* key) { return j_.at(key); }

  ~Reader() {
    if (!j_.is_object()) return;
    for (const auto& [key, value] : j_.items()) {
      bool found = false;
      for (const auto& k : known_) {
        if (key == k) {
          found = true;
          break;
        }
      }
      if (!found) warnings_.push_back("unknown key: " + prefix_ + key);
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string> known_;
  std::vector<std::string>& warnings_;
  std::vector<std::string>& errors_;
};

}  // namespace

void validate_config(const RootConfig& cfg) {
  std::vector<std::string> errors;
  try {
    validate_link(cfg.env.link);
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  if (cfg.env.outage_fraction <= 0.0 || cfg.env.outage_fraction > 1.0) {
    errors.push_back("env.outage_fraction must be in (0,1]");
  }
  if (cfg.env.queue_capacity_mbit < 0.0) errors.push_back("env.queue_capacity_mbit must be >= 0");
  if (cfg.env.kpi_window < 1) errors.push_back("env.kpi_window must be >= 1");
  if (cfg.cusum.window < 2) errors.push_back("cusum.window must be >= 2");
  if (cfg.cusum.threshold_sigmas <= 0.0) errors.push_back("cusum.threshold_sigmas must be > 0");
  if (cfg.cusum.slack < 0.0) errors.push_back("cusum.slack must be >= 0");
  if (cfg.ppo.lr <= 0.0) errors.push_back("ppo.lr must be > 0");
  if (!(cfg.ppo.clip_epsilon > 0.0 && cfg.ppo.clip_epsilon < 1.0)) {
    errors.push_back("ppo.clip_epsilon must be in (0,1)");
  }
  if (!(cfg.ppo.gamma > 0.0 && cfg.ppo.gamma < 1.0)) errors.push_back("ppo.gamma must be in (0,1)");
  if (!(cfg.ppo.gae_lambda >= 0.0 && cfg.ppo.gae_lambda <= 1.0)) {
    errors.push_back("ppo.gae_lambda must be in [0,1]");
  }
  if (cfg.ppo.rollout_len < 1) errors.push_back("ppo.rollout_len must be >= 1");
  if (cfg.ppo.minibatch < 1) errors.push_back("ppo.minibatch must be >= 1");
  if (cfg.ppo.epochs_per_update < 1) errors.push_back("ppo.epochs_per_update must be >= 1");
  if (cfg.ppo.reward_scale <= 0.0) errors.push_back("ppo.reward_scale must be > 0");
  if (cfg.ppo.initial_action_std <= 0.0) errors.push_back("ppo.initial_action_std must be > 0");
  if (cfg.ppo.hidden.empty()) errors.push_back("ppo.hidden must have at least one layer");
  if (cfg.seeds.empty()) errors.push_back("seeds must be non-empty");
  if (cfg.steps < 1) errors.push_back("steps must be >= 1");
  if (cfg.regime_cycle_steps < 1) errors.push_back("regime_cycle_steps must be >= 1");
  if (cfg.parallelism < 1) errors.push_back("parallelism must be >= 1");
  if (cfg.anchor_k < 1) errors.push_back("anchor_k must be >= 1");
  if (!(cfg.probe_delta >= 0.0 && cfg.probe_delta < 1.0)) {
    errors.push_back("probe_delta must be in [0,1)");
  }
  if (cfg.probe_rounds < 1) errors.push_back("probe_rounds must be >= 1");
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    if (cfg.architect.fixed_weights[i] < 0.0 || !std::isfinite(cfg.architect.fixed_weights[i])) {
      errors.push_back("architect.fixed_weights must be non-negative and finite");
      break;
    }
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "config validation failed (" << errors.size() << " violation"
        << (errors.size() > 1 ? "s" : "") << "):";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
  }
}

ConfigLoadResult load_config_text(const std::string& json_text) {
  json j;
  try {
    j = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_null()) j = json::object();
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");

  ConfigLoadResult result;
  RootConfig& cfg = result.config;
  std::vector<std::string> errors;

  {
    Reader root(j, "", result.warnings, errors);
    if (root.has("link")) {
      Reader r(root.sub("link"), "link.", result.warnings, errors);
      auto& l = cfg.env.link;
      r.get("num_beams", l.num_beams);
      r.get("altitude_km", l.altitude_km);
      r.get("carrier_ghz", l.carrier_ghz);
      r.get("total_bandwidth_mhz", l.total_bandwidth_mhz);
      r.get("eirp_dbw", l.eirp_dbw);
      r.get("rx_gain_dbi", l.rx_gain_dbi);
      r.get("noise_temp_k", l.noise_temp_k);
      r.get("atmos_loss_db", l.atmos_loss_db);
      r.get("rain_fade_std_db", l.rain_fade_std_db);
    }
    if (root.has("env")) {
      Reader r(root.sub("env"), "env.", result.warnings, errors);
      r.get("outage_fraction", cfg.env.outage_fraction);
      r.get("queue_capacity_mbit", cfg.env.queue_capacity_mbit);
      r.get("step_seconds", cfg.env.step_seconds);
      r.get("kpi_window", cfg.env.kpi_window);
    }
    if (root.has("regimes")) {
      Reader r(root.sub("regimes"), "regimes.", result.warnings, errors);
      auto& p = cfg.env.regime_params;
      r.get("sinusoid_period_steps", p.sinusoid_period_steps);
      r.get("sinusoid_base_mbps", p.sinusoid_base_mbps);
      r.get("sinusoid_amp_mbps", p.sinusoid_amp_mbps);
      r.get("iot_burst_prob", p.iot_burst_prob);
      r.get("iot_burst_factor", p.iot_burst_factor);
      r.get("hot_beam_count", p.hot_beam_count);
    }
    if (root.has("cusum")) {
      Reader r(root.sub("cusum"), "cusum.", result.warnings, errors);
      r.get("window", cfg.cusum.window);
      r.get("threshold_sigmas", cfg.cusum.threshold_sigmas);
      r.get("slack", cfg.cusum.slack);
      r.get("min_interval_steps", cfg.cusum.min_interval_steps);
    }
    if (root.has("ppo")) {
      Reader r(root.sub("ppo"), "ppo.", result.warnings, errors);
      auto& p = cfg.ppo;
      r.get("lr", p.lr);
      r.get("clip_epsilon", p.clip_epsilon);
      r.get("gamma", p.gamma);
      r.get("gae_lambda", p.gae_lambda);
      r.get("rollout_len", p.rollout_len);
      r.get("minibatch", p.minibatch);
      r.get("epochs_per_update", p.epochs_per_update);
      r.get("entropy_coef", p.entropy_coef);
      r.get("value_coef", p.value_coef);
      r.get("reward_scale", p.reward_scale);
      r.get("initial_action_std", p.initial_action_std);
      r.get("hidden", p.hidden);
    }
    if (root.has("architect")) {
      Reader r(root.sub("architect"), "architect.", result.warnings, errors);
      std::string kind = architect_kind_name(cfg.architect.kind);
      std::string guard = guard_kind_name(cfg.architect.guard);
      r.get("kind", kind);
      r.get("guard", guard);
      try {
        cfg.architect.kind = architect_kind_from_string(kind);
      } catch (const std::exception& e) {
        errors.emplace_back(e.what());
      }
      try {
        cfg.architect.guard = guard_kind_from_string(guard);
      } catch (const std::exception& e) {
        errors.emplace_back(e.what());
      }
      r.get("cooldown_steps", cfg.architect.cooldown_steps);
      r.get("throttle_interval", cfg.architect.throttle_interval);
      r.get("mlp_model_path", cfg.architect.mlp_model_path);
      r.get_weights("fixed_weights", cfg.architect.fixed_weights);
      if (r.has("profiles")) {
        Reader pr(root.sub("architect").at("profiles"), "architect.profiles.", result.warnings,
                  errors);
        pr.get_weights("urban", cfg.architect.profiles.urban);
        pr.get_weights("maritime", cfg.architect.profiles.maritime);
        pr.get_weights("disaster", cfg.architect.profiles.disaster);
        pr.get_weights("mixed", cfg.architect.profiles.mixed);
      }
      if (r.has("oscillation")) {
        Reader osc(root.sub("architect").at("oscillation"), "architect.oscillation.",
                   result.warnings, errors);
        osc.get_weights("mode_low", cfg.architect.oscillation.mode_low);
        osc.get_weights("mode_high", cfg.architect.oscillation.mode_high);
        osc.get("switch_prob", cfg.architect.oscillation.switch_prob);
        osc.get("jitter_std", cfg.architect.oscillation.jitter_std);
      }
    }
    if (root.has("llm")) {
      Reader r(root.sub("llm"), "llm.", result.warnings, errors);
      auto& l = cfg.llm;
      r.get("endpoint", l.endpoint);
      r.get("model", l.model);
      r.get("api_key_env", l.api_key_env);
      r.get("temperature", l.temperature);
      r.get("timeout_seconds", l.timeout_seconds);
      r.get("max_retries", l.max_retries);
      r.get("prompt_template_path", l.prompt_template_path);
    }
    if (root.has("satisfaction")) {
      Reader r(root.sub("satisfaction"), "satisfaction.", result.warnings, errors);
      r.get("reference_rate_mbps", cfg.satisfaction.reference_rate_mbps);
      r.get("max_switching_cost", cfg.satisfaction.max_switching_cost);
    }
    if (root.has("scaler")) {
      Reader r(root.sub("scaler"), "scaler.", result.warnings, errors);
      r.get("lo", cfg.scaler.lo);
      r.get("hi", cfg.scaler.hi);
    }
    root.get("seeds", cfg.seeds);
    root.get("steps", cfg.steps);
    root.get("regime_cycle_steps", cfg.regime_cycle_steps);
    root.get("intent_schedule_path", cfg.intent_schedule_path);
    root.get("anchor_store_path", cfg.anchor_store_path);
    root.get("out_dir", cfg.out_dir);
    root.get("parallelism", cfg.parallelism);
    root.get("anchor_k", cfg.anchor_k);
    root.get("probe_delta", cfg.probe_delta);
    root.get("probe_rounds", cfg.probe_rounds);
  }

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "config schema violations (" << errors.size() << "):";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
  }
  validate_config(cfg);
  return result;
}

ConfigLoadResult load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_config_text(ss.str());
}

std::string save_config_text(const RootConfig& cfg) {
  json j;
  j["link"] = {{"num_beams", cfg.env.link.num_beams},
               {"altitude_km", cfg.env.link.altitude_km},
               {"carrier_ghz", cfg.env.link.carrier_ghz},
               {"total_bandwidth_mhz", cfg.env.link.total_bandwidth_mhz},
               {"eirp_dbw", cfg.env.link.eirp_dbw},
               {"rx_gain_dbi", cfg.env.link.rx_gain_dbi},
               {"noise_temp_k", cfg.env.link.noise_temp_k},
               {"atmos_loss_db", cfg.env.link.atmos_loss_db},
               {"rain_fade_std_db", cfg.env.link.rain_fade_std_db}};
  j["env"] = {{"outage_fraction", cfg.env.outage_fraction},
              {"queue_capacity_mbit", cfg.env.queue_capacity_mbit},
              {"step_seconds", cfg.env.step_seconds},
              {"kpi_window", cfg.env.kpi_window}};
  j["regimes"] = {{"sinusoid_period_steps", cfg.env.regime_params.sinusoid_period_steps},
                  {"sinusoid_base_mbps", cfg.env.regime_params.sinusoid_base_mbps},
                  {"sinusoid_amp_mbps", cfg.env.regime_params.sinusoid_amp_mbps},
                  {"iot_burst_prob", cfg.env.regime_params.iot_burst_prob},
                  {"iot_burst_factor", cfg.env.regime_params.iot_burst_factor},
                  {"hot_beam_count", cfg.env.regime_params.hot_beam_count}};
  j["cusum"] = {{"window", cfg.cusum.window},
                {"threshold_sigmas", cfg.cusum.threshold_sigmas},
                {"slack", cfg.cusum.slack},
                {"min_interval_steps", cfg.cusum.min_interval_steps}};
  j["ppo"] = {{"lr", cfg.ppo.lr},
              {"clip_epsilon", cfg.ppo.clip_epsilon},
              {"gamma", cfg.ppo.gamma},
              {"gae_lambda", cfg.ppo.gae_lambda},
              {"rollout_len", cfg.ppo.rollout_len},
              {"minibatch", cfg.ppo.minibatch},
              {"epochs_per_update", cfg.ppo.epochs_per_update},
              {"entropy_coef", cfg.ppo.entropy_coef},
              {"value_coef", cfg.ppo.value_coef},
              {"reward_scale", cfg.ppo.reward_scale},
              {"initial_action_std", cfg.ppo.initial_action_std},
              {"hidden", cfg.ppo.hidden}};
  j["architect"] = {{"kind", architect_kind_name(cfg.architect.kind)},
                    {"guard", guard_kind_name(cfg.architect.guard)},
                    {"cooldown_steps", cfg.architect.cooldown_steps},
                    {"throttle_interval", cfg.architect.throttle_interval},
                    {"mlp_model_path", cfg.architect.mlp_model_path},
                    {"fixed_weights", weights_to_json(cfg.architect.fixed_weights)},
                    {"profiles",
                     {{"urban", weights_to_json(cfg.architect.profiles.urban)},
                      {"maritime", weights_to_json(cfg.architect.profiles.maritime)},
                      {"disaster", weights_to_json(cfg.architect.profiles.disaster)},
                      {"mixed", weights_to_json(cfg.architect.profiles.mixed)}}},
                    {"oscillation",
                     {{"mode_low", weights_to_json(cfg.architect.oscillation.mode_low)},
                      {"mode_high", weights_to_json(cfg.architect.oscillation.mode_high)},
                      {"switch_prob", cfg.architect.oscillation.switch_prob},
                      {"jitter_std", cfg.architect.oscillation.jitter_std}}}};
  j["llm"] = {{"endpoint", cfg.llm.endpoint},
              {"model", cfg.llm.model},
              {"api_key_env", cfg.llm.api_key_env},
              {"temperature", cfg.llm.temperature},
              {"timeout_seconds", cfg.llm.timeout_seconds},
              {"max_retries", cfg.llm.max_retries},
              {"prompt_template_path", cfg.llm.prompt_template_path}};
  j["satisfaction"] = {{"reference_rate_mbps", cfg.satisfaction.reference_rate_mbps},
                       {"max_switching_cost", cfg.satisfaction.max_switching_cost}};
  j["scaler"] = {{"lo", cfg.scaler.lo}, {"hi", cfg.scaler.hi}};
  j["seeds"] = cfg.seeds;
  j["steps"] = cfg.steps;
  j["regime_cycle_steps"] = cfg.regime_cycle_steps;
  j["intent_schedule_path"] = cfg.intent_schedule_path;
  j["anchor_store_path"] = cfg.anchor_store_path;
  j["out_dir"] = cfg.out_dir;
  j["parallelism"] = cfg.parallelism;
  j["anchor_k"] = cfg.anchor_k;
  j["probe_delta"] = cfg.probe_delta;
  j["probe_rounds"] = cfg.probe_rounds;
  return j.dump(2);
}

void save_config(const RootConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write config: " + path);
  f << save_config_text(cfg);
}

}  // namespace satsched
