#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satsched/ppo.hpp"
#include "satsched/regimes.hpp"
#include "satsched/reward.hpp"

namespace satsched {

// Single-variable causal probe: one weight, one direction, rounds paired
// against a shared baseline on identical environment seeds.
struct ProbeSpec {
  RegimeLabel regime = RegimeLabel::polar_handover;
  WeightVector base_weights;
  double delta = 0.20;
  std::uint64_t steps = 50000;
  int rounds = 3;
  std::vector<std::uint64_t> seeds = {42, 123, 456};
};

struct ProbeResult {
  RegimeLabel regime = RegimeLabel::mixed;
  std::string weight_name;
  int direction = +1;  // +1 or -1
  double delta_rate_mbps = 0.0;
  double baseline_rate_mbps = 0.0;
  std::vector<double> per_round_rates;
  bool complete = true;
};

struct ProbeReport {
  ProbeSpec spec;
  std::vector<ProbeResult> results;  // 10 entries: 5 weights x 2 directions
  double baseline_rate_mbps = 0.0;
  double baseline_std_mbps = 0.0;
  std::vector<double> baseline_per_round;
  std::uint64_t total_training_steps = 0;  // compute budget actually spent

  std::string to_json() const;
  std::string to_csv() const;
};

// Hooks so tests can substitute a rigged environment or a lighter PPO config.
struct ProbeContext {
  EnvFactory make_env;  // seed -> environment (already bound to the regime)
  PpoConfig ppo;
  CusumConfig cusum;  // detector disabled during probes; kept for config echo
  int parallelism = 1;
};

ProbeContext default_probe_context(const EnvConfig& env_cfg, RegimeLabel regime,
                                   const PpoConfig& ppo);

// Runs `rounds` baseline trainings plus 10 perturbed variants, every run
// seed-paired with its baseline. A failed round marks that result incomplete
// and leaves the others standing.
ProbeReport run_probe(const ProbeSpec& spec, const ProbeContext& ctx);

// Argmax over positive delta rates; ties resolve in canonical weight order
// (sum_rate, outage, switching, queue, fairness), + before -. Nothing
// positive -> nullopt.
std::optional<ProbeResult> strongest_axis(const std::vector<ProbeResult>& results);

struct CausalMapRow {
  RegimeLabel regime;
  std::string weight_name;
  int direction = +1;
  double delta_rate_mbps = 0.0;
};

struct CausalMap {
  std::vector<CausalMapRow> rows;
  std::string to_csv() const;
  std::string to_json() const;
};

CausalMap causal_map(const std::vector<ProbeReport>& reports);

}  // namespace satsched
