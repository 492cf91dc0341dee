#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "satsched/env.hpp"
#include "satsched/events.hpp"
#include "satsched/nets.hpp"
#include "satsched/reward.hpp"
#include "satsched/rng.hpp"

namespace satsched {

struct WeightProfile {
  std::string name;
  WeightVector weights;
};

// Default expert profiles: disaster leans on the outage penalty, maritime on
// fairness; all are config-overridable.
struct ExpertProfiles {
  WeightVector urban{1.2, 1.0, 0.3, 0.5, 0.5};
  WeightVector maritime{0.8, 0.6, 0.2, 0.3, 1.2};
  WeightVector disaster{0.6, 2.0, 0.2, 1.0, 0.8};
  WeightVector mixed{1.0, 1.0, 0.3, 0.5, 0.8};

  const WeightVector& for_regime(RegimeLabel r) const;
  bool operator==(const ExpertProfiles&) const = default;
};

// Slow-timescale weight generator: maps a KPI snapshot to a weight vector.
// propose() is only called at regime-alarm boundaries, never per step.
class Architect {
 public:
  virtual ~Architect() = default;
  virtual WeightVector propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

// M1: static weights.
class FixedArchitect final : public Architect {
 public:
  explicit FixedArchitect(WeightVector w0) : w0_(clamp_weights(w0)) {}
  WeightVector propose(const KpiSnapshot&, std::uint64_t, Rng&) override { return w0_; }
  std::string name() const override { return "fixed"; }

 private:
  WeightVector w0_;
};

// M2: KPI threshold classifier over four expert profiles. Disaster is checked
// first; urban and maritime next; everything else falls through to mixed.
class RuleArchitect final : public Architect {
 public:
  explicit RuleArchitect(ExpertProfiles profiles = {}) : profiles_(profiles) {}
  RegimeLabel classify(const KpiSnapshot& kpi) const;
  WeightVector propose(const KpiSnapshot& kpi, std::uint64_t, Rng&) override;
  std::string name() const override { return "rule"; }

 private:
  ExpertProfiles profiles_;
};

// Affine per-feature scaling of the 5-dim KPI vector into [0,1]; persisted
// with any model that consumed it so distances stay comparable.
struct FeatureScaler {
  std::array<double, 5> lo{0.0, 0.0, 0.0, 0.0, -10.0};
  std::array<double, 5> hi{150.0, 300.0, 1.0, 1.0, 10.0};

  std::array<double, 5> normalize(const KpiSnapshot& kpi) const;
  bool operator==(const FeatureScaler&) const = default;
};

// M3: 5-64-64-5 network with softplus outputs, so raw outputs are positive by
// construction before the clamp.
class MlpArchitect final : public Architect {
 public:
  MlpArchitect(Mlp net, FeatureScaler scaler, EventLog* log = nullptr);
  static MlpArchitect untrained(std::uint64_t seed, FeatureScaler scaler = {});

  WeightVector forward(const KpiSnapshot& kpi) const;
  WeightVector propose(const KpiSnapshot& kpi, std::uint64_t step, Rng&) override;
  std::string name() const override { return "mlp"; }

  const Mlp& net() const { return net_; }
  const FeatureScaler& scaler() const { return scaler_; }

  std::string to_json() const;
  static MlpArchitect from_json(const std::string& text, EventLog* log = nullptr);
  void save(const std::string& path) const;
  static MlpArchitect load(const std::string& path, EventLog* log = nullptr);

 private:
  Mlp net_;
  FeatureScaler scaler_;
  EventLog* log_;
  mutable std::uint64_t last_step_ = 0;
};

struct MlpTrainConfig {
  int epochs = 600;
  double lr = 1e-3;
  double momentum = 0.9;
  int batch = 32;
  double holdout_fraction = 0.10;
};

struct MlpTrainReport {
  double initial_val_mse = 0.0;
  double best_val_mse = 0.0;
  int best_epoch = -1;
};

// SGD-with-momentum MSE regression onto target weight vectors; returns the
// best-validation model. Empty dataset or NaN loss throws.
MlpArchitect mlp_train(const std::vector<std::pair<KpiSnapshot, WeightVector>>& dataset,
                       const MlpTrainConfig& cfg, std::uint64_t seed,
                       const FeatureScaler& scaler = {}, MlpTrainReport* report = nullptr);

// Synthetic (KPI, target-profile) samples: KPIs drawn inside each regime's
// classification cell, targets are that regime's expert profile plus noise.
std::vector<std::pair<KpiSnapshot, WeightVector>> synth_profile_dataset(
    const ExpertProfiles& profiles, int samples_per_regime, double noise_std, std::uint64_t seed);

// Simulated fine-tuned-LLM architect: a two-mode process whose output
// alternates between a low and a high outage-weight profile with per-call
// Gaussian jitter. Default calibration gives CV(w_o) near 0.96 on a balanced
// call stream.
struct OscillationModel {
  WeightVector mode_low{1.0, 0.01, 0.3, 0.5, 0.8};
  WeightVector mode_high{1.0, 0.50, 0.3, 0.5, 0.8};
  double switch_prob = 0.4;
  double jitter_std = 0.02;
};

class OscillatingArchitect final : public Architect {
 public:
  explicit OscillatingArchitect(OscillationModel model, bool start_high = false);
  WeightVector propose(const KpiSnapshot&, std::uint64_t, Rng& rng) override;
  std::string name() const override { return "osc_llm"; }
  bool in_high_mode() const { return high_; }

 private:
  OscillationModel model_;
  bool high_;
};

// Schedule oracle used by the dilemma experiments: returns the scheduled
// regime's expert profile, so the switching run tracks regime-optimal weights
// exactly at every boundary.
class ScheduleOracleArchitect final : public Architect {
 public:
  ScheduleOracleArchitect(RegimeSchedule schedule, ExpertProfiles profiles = {});
  WeightVector propose(const KpiSnapshot&, std::uint64_t step, Rng&) override;
  std::string name() const override { return "schedule_oracle"; }

 private:
  RegimeSchedule schedule_;
  ExpertProfiles profiles_;
};

// Per-regime target weights for the switching arm of the stationarity
// experiments: the held-out regimes get their probe-grounded vectors (heavy
// switching term for the rotating/imbalanced patterns, sum-rate push for the
// device swarm), known regimes fall back to the expert profiles.
WeightVector probe_grounded_weights(RegimeLabel regime, const ExpertProfiles& profiles = {});

// A tracker following per-regime targets from live KPI consults: every
// proposal is the scheduled regime's target plus tracking noise, so applied
// weights change at essentially every consult like a regression model
// re-fitting targets from a noisy KPI window would.
class TrackingOracleArchitect final : public Architect {
 public:
  TrackingOracleArchitect(RegimeSchedule schedule, double tracking_noise = 0.05,
                          ExpertProfiles profiles = {});
  WeightVector propose(const KpiSnapshot&, std::uint64_t step, Rng& rng) override;
  std::string name() const override { return "tracking_oracle"; }

 private:
  RegimeSchedule schedule_;
  double noise_;
  ExpertProfiles profiles_;
};

// Suppresses applied changes closer than min_steps to the previous applied
// change. An identical proposal (L-inf <= switch threshold) neither switches
// nor restarts the cooldown clock.
class CooldownGuard final : public Architect {
 public:
  CooldownGuard(std::unique_ptr<Architect> inner, WeightVector initial,
                std::uint64_t min_steps = 50, EventLog* log = nullptr,
                double switch_threshold = 0.01);
  WeightVector propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) override;
  std::string name() const override { return "cooldown(" + inner_->name() + ")"; }
  const WeightVector& current() const { return current_; }

 private:
  std::unique_ptr<Architect> inner_;
  WeightVector current_;
  std::uint64_t min_steps_;
  std::optional<std::uint64_t> last_change_;
  EventLog* log_;
  double threshold_;
};

// Path C wrapper: accepts at most one target per max_interval steps and walks
// the applied vector linearly from the old value to the target over that
// interval. weights_at(step) is the per-step applied value.
class ThrottleInterpolate final : public Architect {
 public:
  ThrottleInterpolate(std::unique_ptr<Architect> inner, WeightVector initial,
                      std::uint64_t max_interval = 1000, EventLog* log = nullptr);
  WeightVector propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) override;
  WeightVector weights_at(std::uint64_t step) const;
  std::string name() const override { return "throttle(" + inner_->name() + ")"; }

 private:
  std::unique_ptr<Architect> inner_;
  WeightVector from_, target_;
  std::optional<std::uint64_t> accept_step_;
  std::uint64_t max_interval_;
  EventLog* log_;
};

}  // namespace satsched
