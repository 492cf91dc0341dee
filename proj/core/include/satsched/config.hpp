#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satsched/architect.hpp"
#include "satsched/cusum.hpp"
#include "satsched/env.hpp"
#include "satsched/intent.hpp"
#include "satsched/llm_client.hpp"
#include "satsched/ppo.hpp"

namespace satsched {

enum class ArchitectKind { fixed, rule, mlp, osc_llm, llm_api, schedule_oracle };

const char* architect_kind_name(ArchitectKind k);
ArchitectKind architect_kind_from_string(const std::string& name);

enum class GuardKind { none, cooldown, throttle };

struct ArchitectConfig {
  ArchitectKind kind = ArchitectKind::fixed;
  ExpertProfiles profiles;
  WeightVector fixed_weights{1.0, 1.0, 0.3, 0.5, 0.8};
  OscillationModel oscillation;
  std::string mlp_model_path;  // empty -> train a fresh one on synthetic data
  GuardKind guard = GuardKind::cooldown;
  std::uint64_t cooldown_steps = 50;
  std::uint64_t throttle_interval = 1000;
};

// Everything a run needs; JSON round-trips through load/save.
struct RootConfig {
  EnvConfig env;
  CusumConfig cusum;
  PpoConfig ppo;
  ArchitectConfig architect;
  LlmClientConfig llm;
  SatisfactionConfig satisfaction;
  FeatureScaler scaler;

  std::vector<std::uint64_t> seeds = {42, 123, 456};
  std::uint64_t steps = 50000;
  std::uint64_t regime_cycle_steps = 2000;
  std::string intent_schedule_path;
  std::string anchor_store_path = "anchors.jsonl";
  std::string out_dir = "runs";
  int parallelism = 2;
  int anchor_k = 3;
  double probe_delta = 0.20;
  int probe_rounds = 3;
};

struct ConfigLoadResult {
  RootConfig config;
  std::vector<std::string> warnings;  // unknown keys
};

// Parse + validate a JSON config document; missing fields take defaults, an
// empty document is entirely defaults. Schema violations throw
// std::invalid_argument listing every violation at once.
ConfigLoadResult load_config_text(const std::string& json_text);
ConfigLoadResult load_config(const std::string& path);

std::string save_config_text(const RootConfig& cfg);
void save_config(const RootConfig& cfg, const std::string& path);

// Cross-field validation shared by load and by hand-built configs.
void validate_config(const RootConfig& cfg);

}  // namespace satsched
