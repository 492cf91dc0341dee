#include "satsched/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "satsched/fairness.hpp"

namespace satsched {

double KpiSnapshot::operator[](int i) const {
  switch (i) {
    case 0: return mean_demand_mbps;
    case 1: return peak_demand_mbps;
    case 2: return gini;
    case 3: return outage_rate;
    case 4: return demand_trend;
  }
  throw std::out_of_range("KpiSnapshot index");
}

StepResult env_step_once(EnvState& state, std::span<const double> action, const EnvConfig& cfg) {
  const int n = cfg.link.num_beams;
  if (static_cast<int>(action.size()) < n) {
    throw std::invalid_argument("action shorter than num_beams");
  }
  for (int b = 0; b < n; ++b) {
    if (std::isnan(action[b])) {
      throw std::invalid_argument("NaN in action component " + std::to_string(b));
    }
  }

  // Clamp to [0,1], then L1-project onto the sum <= 1 simplex.
  std::vector<double> alloc(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int b = 0; b < n; ++b) {
    alloc[b] = std::clamp(action[b], 0.0, 1.0);
    total += alloc[b];
  }
  if (total > 1.0) {
    for (double& a : alloc) a /= total;
  }

  const double dt = cfg.step_seconds;
  std::vector<double> served(static_cast<std::size_t>(n), 0.0);
  StepResult out;
  double demand_sum = 0.0, served_sum = 0.0, overflow_sum = 0.0;
  double switching = 0.0;
  double outages = 0.0;

  for (int b = 0; b < n; ++b) {
    const double capacity = shannon_rate(alloc[b], state.snr_linear[b], cfg.link) * dt;  // Mbit
    const double backlog = state.demand_mbps[b] * dt + state.queue_mbits[b];
    const double sent = std::min(capacity, backlog);
    served[b] = sent / dt;  // Mbps equivalent
    double residual = backlog - sent;
    if (residual > cfg.queue_capacity_mbit) {
      overflow_sum += residual - cfg.queue_capacity_mbit;
      residual = cfg.queue_capacity_mbit;
    }
    state.queue_mbits[b] = residual;

    demand_sum += state.demand_mbps[b];
    served_sum += served[b];
    if (state.demand_mbps[b] > 0.0 && served[b] < cfg.outage_fraction * state.demand_mbps[b]) {
      outages += 1.0;
    }
    switching += std::abs(alloc[b] - state.prev_alloc[b]);
  }

  out.terms.sum_rate_norm =
      demand_sum > 0.0 ? std::clamp(served_sum / demand_sum, 0.0, 1.0) : 0.0;
  out.terms.outage_count = outages;
  out.terms.switching = switching;
  // Overflow reported in queue-capacity units so the term stays on the same
  // O(1) scale as the others.
  out.terms.queue_overflow =
      cfg.queue_capacity_mbit > 0.0 ? overflow_sum / cfg.queue_capacity_mbit : overflow_sum;
  out.terms.fairness = jain(served);
  out.sum_rate_mbps = served_sum;

  state.prev_alloc = alloc;
  state.step_index += 1;
  return out;
}

SatEnv::SatEnv(EnvConfig cfg, RegimeSchedule schedule, std::uint64_t seed)
    : cfg_(std::move(cfg)), schedule_(std::move(schedule)), seed_(seed),
      rng_(Rng::mix(seed, 0x5a7e11f7)) {
  validate_link(cfg_.link);
  if (cfg_.kpi_window < 1) throw std::invalid_argument("kpi_window must be >= 1");
  const auto n = static_cast<std::size_t>(cfg_.link.num_beams);
  state_.demand_mbps.assign(n, 0.0);
  state_.queue_mbits.assign(n, 0.0);
  state_.snr_linear.assign(n, 1.0);
  state_.prev_alloc.assign(n, 0.0);
  state_.step_index = 0;
  refresh_exogenous();
}

void SatEnv::refresh_exogenous() {
  state_.demand_mbps = sample_demand(schedule_.at(state_.step_index), seed_, state_.step_index,
                                     cfg_.link.num_beams, cfg_.regime_params);
  for (auto& s : state_.snr_linear) s = draw_snr_linear(cfg_.link, rng_);
}

void SatEnv::observe(std::vector<double>& out) const {
  const int n = cfg_.link.num_beams;
  out.resize(static_cast<std::size_t>(5 * n));
  // Fixed normalization keeps the observation layout regime-independent. The
  // demand-share block gives the policy the proportional-allocation pattern
  // directly instead of forcing it to renormalize across beams itself.
  constexpr double kDemandRef = 200.0;
  double total_demand = 0.0;
  for (int b = 0; b < n; ++b) total_demand += state_.demand_mbps[b];
  const double share_scale = total_demand > 0.0 ? static_cast<double>(n) / total_demand : 0.0;
  for (int b = 0; b < n; ++b) {
    out[b] = state_.demand_mbps[b] / kDemandRef;
    out[n + b] = state_.demand_mbps[b] * share_scale;
    out[2 * n + b] = state_.queue_mbits[b] / cfg_.queue_capacity_mbit;
    out[3 * n + b] = std::log2(1.0 + state_.snr_linear[b]) / 10.0;
    out[4 * n + b] = state_.prev_alloc[b];
  }
}

StepResult SatEnv::step(std::span<const double> action) {
  StepResult res = env_step_once(state_, action, cfg_);

  const auto& d = state_.demand_mbps;  // note: demand of the step just served
  WindowSample sample;
  sample.mean_demand = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  sample.peak_demand = *std::max_element(d.begin(), d.end());
  sample.gini = gini(d);
  sample.outage_rate = res.terms.outage_count / static_cast<double>(cfg_.link.num_beams);
  window_.push_back(sample);
  while (static_cast<int>(window_.size()) > cfg_.kpi_window) window_.pop_front();

  res.kpi = kpi();

  // Draw next step's demand and fades so observations see the state the next
  // action will face.
  refresh_exogenous();
  return res;
}

KpiSnapshot regime_kpi_centroid(const EnvConfig& cfg, RegimeLabel regime, std::uint64_t seed,
                                int steps) {
  KpiSnapshot k;
  if (steps < 1) throw std::invalid_argument("regime_kpi_centroid: steps must be >= 1");
  for (int t = 0; t < steps; ++t) {
    const auto d = sample_demand(regime, seed, static_cast<std::uint64_t>(t),
                                 cfg.link.num_beams, cfg.regime_params);
    k.mean_demand_mbps +=
        std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    k.peak_demand_mbps += *std::max_element(d.begin(), d.end());
    k.gini += gini(d);
  }
  k.mean_demand_mbps /= steps;
  k.peak_demand_mbps /= steps;
  k.gini /= steps;
  return k;
}

KpiSnapshot SatEnv::kpi() const {
  KpiSnapshot k;
  if (window_.empty()) return k;
  const double m = static_cast<double>(window_.size());
  double trend_num = 0.0, trend_den = 0.0;
  const double t_mean = (m - 1.0) / 2.0;
  double mean_of_means = 0.0;
  for (const auto& w : window_) mean_of_means += w.mean_demand;
  mean_of_means /= m;

  std::size_t i = 0;
  for (const auto& w : window_) {
    k.mean_demand_mbps += w.mean_demand;
    k.peak_demand_mbps = std::max(k.peak_demand_mbps, w.peak_demand);
    k.gini += w.gini;
    k.outage_rate += w.outage_rate;
    const double dt = static_cast<double>(i) - t_mean;
    trend_num += dt * (w.mean_demand - mean_of_means);
    trend_den += dt * dt;
    ++i;
  }
  k.mean_demand_mbps /= m;
  k.gini /= m;
  k.outage_rate /= m;
  k.demand_trend = trend_den > 0.0 ? trend_num / trend_den : 0.0;
  return k;
}

}  // namespace satsched
