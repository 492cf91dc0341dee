#include "satsched/architect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace satsched {

const WeightVector& ExpertProfiles::for_regime(RegimeLabel r) const {
  switch (r) {
    case RegimeLabel::urban: return urban;
    case RegimeLabel::maritime: return maritime;
    case RegimeLabel::disaster: return disaster;
    default: return mixed;
  }
}

RegimeLabel RuleArchitect::classify(const KpiSnapshot& kpi) const {
  // Disaster first: safety dominates the other classes.
  if (kpi.peak_demand_mbps > 120.0) return RegimeLabel::disaster;
  if (kpi.mean_demand_mbps > 40.0 && kpi.gini > 0.3) return RegimeLabel::urban;
  if (kpi.mean_demand_mbps < 20.0 && kpi.gini < 0.2) return RegimeLabel::maritime;
  return RegimeLabel::mixed;
}

WeightVector RuleArchitect::propose(const KpiSnapshot& kpi, std::uint64_t, Rng&) {
  return profiles_.for_regime(classify(kpi));
}

std::array<double, 5> FeatureScaler::normalize(const KpiSnapshot& kpi) const {
  std::array<double, 5> out{};
  for (int i = 0; i < 5; ++i) {
    const double span = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] =
        span != 0.0 ? (kpi[i] - lo[static_cast<std::size_t>(i)]) / span : 0.0;
  }
  return out;
}

MlpArchitect::MlpArchitect(Mlp net, FeatureScaler scaler, EventLog* log)
    : net_(std::move(net)), scaler_(scaler), log_(log) {
  if (net_.input_dim() != 5 || net_.output_dim() != 5) {
    throw std::invalid_argument("architect MLP must map 5 -> 5");
  }
}

MlpArchitect MlpArchitect::untrained(std::uint64_t seed, FeatureScaler scaler) {
  Mlp net({5, 64, 64, 5}, Activation::relu, Activation::softplus);
  Rng rng(Rng::mix(seed, 0x317a11));
  net.init(rng);
  return MlpArchitect(std::move(net), scaler);
}

WeightVector MlpArchitect::forward(const KpiSnapshot& kpi) const {
  const auto scaled = scaler_.normalize(kpi);
  for (double v : scaled) {
    if (std::abs(v) > 10.0 && log_) {
      log_->add(last_step_, "scaler_out_of_range", "{\"value\":" + std::to_string(v) + "}");
      break;
    }
  }
  const auto raw = net_.forward(scaled);
  WeightVector w;
  for (std::size_t i = 0; i < kNumWeights; ++i) w[i] = raw[i];
  return clamp_weights(w);
}

WeightVector MlpArchitect::propose(const KpiSnapshot& kpi, std::uint64_t step, Rng&) {
  last_step_ = step;
  return forward(kpi);
}

std::string MlpArchitect::to_json() const {
  nlohmann::json j;
  j["net"] = nlohmann::json::parse(net_.to_json());
  j["scaler"]["lo"] = scaler_.lo;
  j["scaler"]["hi"] = scaler_.hi;
  return j.dump();
}

MlpArchitect MlpArchitect::from_json(const std::string& text, EventLog* log) {
  const auto j = nlohmann::json::parse(text);
  Mlp net = Mlp::from_json(j.at("net").dump());
  FeatureScaler scaler;
  scaler.lo = j.at("scaler").at("lo").get<std::array<double, 5>>();
  scaler.hi = j.at("scaler").at("hi").get<std::array<double, 5>>();
  return MlpArchitect(std::move(net), scaler, log);
}

void MlpArchitect::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write model: " + path);
  f << to_json();
}

MlpArchitect MlpArchitect::load(const std::string& path, EventLog* log) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read model: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str(), log);
}

MlpArchitect mlp_train(const std::vector<std::pair<KpiSnapshot, WeightVector>>& dataset,
                       const MlpTrainConfig& cfg, std::uint64_t seed, const FeatureScaler& scaler,
                       MlpTrainReport* report) {
  if (dataset.empty()) throw std::invalid_argument("mlp_train: empty dataset");

  Rng rng(Rng::mix(seed, 0x7a19));
  Mlp net({5, 64, 64, 5}, Activation::relu, Activation::softplus);
  net.init(rng);

  // Shuffle once, carve off the holdout tail.
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }
  std::size_t val_count = static_cast<std::size_t>(
      std::round(cfg.holdout_fraction * static_cast<double>(dataset.size())));
  val_count = std::min(std::max<std::size_t>(val_count, dataset.size() > 1 ? 1 : 0),
                       dataset.size() - 1);
  const std::size_t train_count = dataset.size() - val_count;

  std::vector<std::array<double, 5>> inputs(dataset.size());
  std::vector<WeightVector> targets(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    inputs[i] = scaler.normalize(dataset[order[i]].first);
    targets[i] = dataset[order[i]].second;
  }

  auto val_mse = [&](const Mlp& m) {
    if (val_count == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = train_count; i < dataset.size(); ++i) {
      const auto out = m.forward(inputs[i]);
      for (std::size_t k = 0; k < kNumWeights; ++k) {
        const double e = out[k] - targets[i][k];
        acc += e * e;
      }
    }
    return acc / (static_cast<double>(val_count) * kNumWeights);
  };

  SgdMomentum opt(net, cfg.lr, cfg.momentum);
  auto grads = net.make_grads();
  Mlp::Cache cache;

  double best = val_mse(net);
  const double initial = best;
  Mlp best_net = net;
  int best_epoch = -1;

  std::vector<std::size_t> idx(train_count);
  for (std::size_t i = 0; i < train_count; ++i) idx[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = train_count; i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
    }
    for (std::size_t start = 0; start < train_count;
         start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t end = std::min(train_count, start + static_cast<std::size_t>(cfg.batch));
      Mlp::zero_grads(grads);
      for (std::size_t k = start; k < end; ++k) {
        net.forward_cached(inputs[idx[k]], cache);
        // Squared error summed over components, averaged over the batch.
        std::array<double, 5> dloss{};
        for (std::size_t c = 0; c < kNumWeights; ++c) {
          dloss[c] = 2.0 * (cache.output[c] - targets[idx[k]][c]);
        }
        net.backward(cache, dloss, grads);
      }
      net.scale_grads(grads, 1.0 / static_cast<double>(end - start));
      opt.step(net, grads);
    }
    const double mse = val_mse(net);
    if (!std::isfinite(mse)) {
      throw std::runtime_error("mlp_train diverged: validation MSE is not finite at epoch " +
                               std::to_string(epoch));
    }
    if (val_count == 0 || mse < best) {
      best = mse;
      best_net = net;
      best_epoch = epoch;
    }
  }

  if (report) {
    report->initial_val_mse = initial;
    report->best_val_mse = best;
    report->best_epoch = best_epoch;
  }
  return MlpArchitect(std::move(best_net), scaler);
}

std::vector<std::pair<KpiSnapshot, WeightVector>> synth_profile_dataset(
    const ExpertProfiles& profiles, int samples_per_regime, double noise_std,
    std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0xda7a5e7));
  std::vector<std::pair<KpiSnapshot, WeightVector>> data;
  data.reserve(static_cast<std::size_t>(samples_per_regime) * 4);
  for (auto regime : {RegimeLabel::urban, RegimeLabel::maritime, RegimeLabel::disaster,
                      RegimeLabel::mixed}) {
    for (int i = 0; i < samples_per_regime; ++i) {
      KpiSnapshot kpi;
      switch (regime) {
        case RegimeLabel::urban:
          kpi.mean_demand_mbps = rng.uniform(42.0, 75.0);
          kpi.gini = rng.uniform(0.32, 0.55);
          kpi.peak_demand_mbps = rng.uniform(70.0, 118.0);
          break;
        case RegimeLabel::maritime:
          kpi.mean_demand_mbps = rng.uniform(4.0, 18.0);
          kpi.gini = rng.uniform(0.02, 0.18);
          kpi.peak_demand_mbps = rng.uniform(8.0, 25.0);
          break;
        case RegimeLabel::disaster:
          kpi.mean_demand_mbps = rng.uniform(15.0, 60.0);
          kpi.gini = rng.uniform(0.3, 0.8);
          kpi.peak_demand_mbps = rng.uniform(130.0, 260.0);
          break;
        default:
          kpi.mean_demand_mbps = rng.uniform(22.0, 38.0);
          kpi.gini = rng.uniform(0.05, 0.28);
          kpi.peak_demand_mbps = rng.uniform(30.0, 60.0);
          break;
      }
      kpi.outage_rate = rng.uniform(0.0, 0.2);
      kpi.demand_trend = rng.uniform(-2.0, 2.0);
      WeightVector target = profiles.for_regime(regime);
      for (std::size_t c = 0; c < kNumWeights; ++c) target[c] += rng.normal(0.0, noise_std);
      data.emplace_back(kpi, clamp_weights(target));
    }
  }
  return data;
}

OscillatingArchitect::OscillatingArchitect(OscillationModel model, bool start_high)
    : model_(std::move(model)), high_(start_high) {
  if (!(model_.switch_prob > 0.0 && model_.switch_prob < 1.0) && model_.switch_prob != 0.0) {
    throw std::invalid_argument("oscillation switch_prob must be in [0,1)");
  }
  model_.mode_low = clamp_weights(model_.mode_low);
  model_.mode_high = clamp_weights(model_.mode_high);
}

WeightVector OscillatingArchitect::propose(const KpiSnapshot&, std::uint64_t, Rng& rng) {
  if (rng.bernoulli(model_.switch_prob)) high_ = !high_;
  WeightVector w = high_ ? model_.mode_high : model_.mode_low;
  for (std::size_t i = 0; i < kNumWeights; ++i) w[i] += rng.normal(0.0, model_.jitter_std);
  return clamp_weights(w);
}

ScheduleOracleArchitect::ScheduleOracleArchitect(RegimeSchedule schedule, ExpertProfiles profiles)
    : schedule_(std::move(schedule)), profiles_(profiles) {}

WeightVector ScheduleOracleArchitect::propose(const KpiSnapshot&, std::uint64_t step, Rng&) {
  return profiles_.for_regime(schedule_.at(step));
}

WeightVector probe_grounded_weights(RegimeLabel regime, const ExpertProfiles& profiles) {
  switch (regime) {
    case RegimeLabel::iot_burst: return WeightVector{1.44, 1.0, 0.3, 0.5, 0.8};
    case RegimeLabel::polar_handover: return WeightVector{1.0, 1.0, 0.96, 0.5, 0.8};
    case RegimeLabel::hot_cold: return WeightVector{1.0, 1.0, 0.96, 0.5, 0.8};
    default: return profiles.for_regime(regime);
  }
}

TrackingOracleArchitect::TrackingOracleArchitect(RegimeSchedule schedule, double tracking_noise,
                                                 ExpertProfiles profiles)
    : schedule_(std::move(schedule)), noise_(tracking_noise), profiles_(profiles) {}

WeightVector TrackingOracleArchitect::propose(const KpiSnapshot&, std::uint64_t step, Rng& rng) {
  WeightVector w = probe_grounded_weights(schedule_.at(step), profiles_);
  for (std::size_t i = 0; i < kNumWeights; ++i) w[i] += rng.normal(0.0, noise_);
  return clamp_weights(w);
}

CooldownGuard::CooldownGuard(std::unique_ptr<Architect> inner, WeightVector initial,
                             std::uint64_t min_steps, EventLog* log, double switch_threshold)
    : inner_(std::move(inner)), current_(clamp_weights(initial)), min_steps_(min_steps),
      log_(log), threshold_(switch_threshold) {}

WeightVector CooldownGuard::propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) {
  if (last_change_ && step - *last_change_ < min_steps_) {
    if (log_) log_->add(step, "cooldown_suppressed");
    return current_;
  }
  const WeightVector proposal = inner_->propose(kpi, step, rng);
  if (linf_distance(proposal, current_) > threshold_) {
    current_ = proposal;
    last_change_ = step;
  }
  return current_;
}

ThrottleInterpolate::ThrottleInterpolate(std::unique_ptr<Architect> inner, WeightVector initial,
                                         std::uint64_t max_interval, EventLog* log)
    : inner_(std::move(inner)), from_(clamp_weights(initial)), target_(from_),
      max_interval_(max_interval), log_(log) {
  if (max_interval_ == 0) throw std::invalid_argument("throttle interval must be > 0");
}

WeightVector ThrottleInterpolate::propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) {
  const WeightVector proposal = inner_->propose(kpi, step, rng);
  if (accept_step_ && step - *accept_step_ < max_interval_) {
    if (log_) log_->add(step, "throttle_deferred");
    return weights_at(step);
  }
  from_ = weights_at(step);
  target_ = proposal;
  accept_step_ = step;
  return from_;
}

WeightVector ThrottleInterpolate::weights_at(std::uint64_t step) const {
  if (!accept_step_) return from_;
  const double f = std::min(
      1.0, static_cast<double>(step - *accept_step_) / static_cast<double>(max_interval_));
  WeightVector w;
  for (std::size_t i = 0; i < kNumWeights; ++i) {
    w[i] = from_[i] + f * (target_[i] - from_[i]);
  }
  return w;
}

}  // namespace satsched
