#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <vector>

#include "satsched/link.hpp"
#include "satsched/regimes.hpp"
#include "satsched/rng.hpp"

namespace satsched {

// Raw objective terms produced by one environment step. The composite reward
// subtracts outage/switching/queue, so all five are reported as magnitudes.
struct RewardTerms {
  double sum_rate_norm = 0.0;   // served / demanded, clamped to [0,1]
  double outage_count = 0.0;    // beams served below the outage fraction
  double switching = 0.0;       // L1 distance between consecutive allocations
  double queue_overflow = 0.0;  // Mbit dropped past queue capacity this step
  double fairness = 1.0;        // Jain index of served rates
};

// Five KPI features summarizing the trailing window; this is what architects
// and the anchor store consume.
struct KpiSnapshot {
  double mean_demand_mbps = 0.0;
  double peak_demand_mbps = 0.0;
  double gini = 0.0;
  double outage_rate = 0.0;
  double demand_trend = 0.0;  // least-squares slope of mean demand, Mbps/step

  double operator[](int i) const;
};

struct EnvState {
  std::vector<double> demand_mbps;
  std::vector<double> queue_mbits;
  std::vector<double> snr_linear;
  std::vector<double> prev_alloc;
  std::uint64_t step_index = 0;
};

struct EnvConfig {
  LinkConfig link;
  RegimeParams regime_params;
  double outage_fraction = 0.5;      // beam is in outage when served < frac * demand
  double queue_capacity_mbit = 100.0;
  double step_seconds = 1.0;
  int kpi_window = 10;

  bool operator==(const EnvConfig&) const = default;
};

struct StepResult {
  RewardTerms terms;
  KpiSnapshot kpi;
  double sum_rate_mbps = 0.0;  // total served this step
};

// Minimal surface the trainer needs; SatEnv is the real simulator and tests
// substitute their own.
class Env {
 public:
  virtual ~Env() = default;
  virtual int num_beams() const = 0;
  virtual int observation_dim() const = 0;
  virtual void observe(std::vector<double>& out) const = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  virtual RegimeLabel current_regime() const = 0;
};

// The 19-beam scheduling environment: regime-driven demand, per-step rain
// fades, per-beam queues, and windowed KPI extraction.
class SatEnv final : public Env {
 public:
  SatEnv(EnvConfig cfg, RegimeSchedule schedule, std::uint64_t seed);

  int num_beams() const override { return cfg_.link.num_beams; }
  int observation_dim() const override { return 5 * cfg_.link.num_beams; }
  void observe(std::vector<double>& out) const override;

  // Action components are clamped to [0,1] and L1-projected onto sum <= 1.
  // NaN entries are rejected with std::invalid_argument.
  StepResult step(std::span<const double> action) override;

  RegimeLabel current_regime() const override { return schedule_.at(state_.step_index); }
  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }
  KpiSnapshot kpi() const;

 private:
  void refresh_exogenous();

  EnvConfig cfg_;
  RegimeSchedule schedule_;
  std::uint64_t seed_;
  Rng rng_;
  EnvState state_;

  struct WindowSample {
    double mean_demand, peak_demand, gini, outage_rate;
  };
  std::deque<WindowSample> window_;
};

// One-shot functional step, used by SatEnv and directly testable: serves
// min(capacity, demand + queue) per beam and fills all five reward terms.
StepResult env_step_once(EnvState& state, std::span<const double> action, const EnvConfig& cfg);

// Demand-side KPI centroid of a regime: averages over `steps` sampled demand
// vectors. Policy-dependent KPIs (outage, trend) are zero.
KpiSnapshot regime_kpi_centroid(const EnvConfig& cfg, RegimeLabel regime, std::uint64_t seed,
                                int steps = 200);

}  // namespace satsched
