#include "satsched/cusum.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "satsched/env.hpp"
#include "satsched/events.hpp"

namespace satsched {

bool cusum_update(CusumState& state, double x, std::uint64_t step, const CusumConfig& cfg) {
  if (!std::isfinite(x)) throw std::invalid_argument("cusum_update: non-finite sample");
  const double delta = cfg.slack * state.std_est;
  state.statistic = std::max(0.0, state.statistic + (x - state.mean_est) - delta);

  // Rounding dust from the window mean (x - mu0 on the order of an ulp) must
  // not accumulate into an alarm on a constant stream.
  const double dust = 1e-9 * (1.0 + std::abs(state.mean_est));
  if (state.statistic < dust) state.statistic = 0.0;

  const bool above = state.statistic > cfg.threshold_sigmas * state.std_est + dust;
  const bool interval_ok =
      !state.last_alarm_step || step - *state.last_alarm_step >= cfg.min_interval_steps;
  if (above && interval_ok) {
    state.statistic = 0.0;
    state.last_alarm_step = step;
    return true;
  }
  return false;
}

CusumDetector::CusumDetector(CusumConfig cfg) : cfg_(cfg) {
  if (cfg_.window < 2) throw std::invalid_argument("cusum window must be >= 2");
  if (cfg_.threshold_sigmas <= 0.0) throw std::invalid_argument("cusum threshold must be > 0");
}

void CusumDetector::reestimate() {
  const double m = static_cast<double>(window_.size());
  double mean = 0.0;
  for (double v : window_) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : window_) var += (v - mean) * (v - mean);
  var /= m;
  pos_.mean_est = mean;
  pos_.std_est = std::sqrt(var);
  neg_.mean_est = -mean;
  neg_.std_est = pos_.std_est;
}

bool CusumDetector::update(double x, std::uint64_t step) {
  window_.push_back(x);
  while (static_cast<int>(window_.size()) > cfg_.window) window_.pop_front();
  if (!warmed_up()) return false;

  // Baseline frozen while a shift is accumulating on either side.
  if (pos_.statistic == 0.0 && neg_.statistic == 0.0) reestimate();

  pos_.last_alarm_step = last_alarm_;
  neg_.last_alarm_step = last_alarm_;
  const bool hi = cusum_update(pos_, x, step, cfg_);
  const bool lo = cusum_update(neg_, -x, step, cfg_);
  if (hi || lo) {
    last_alarm_ = step;
    pos_.statistic = 0.0;
    neg_.statistic = 0.0;
    reestimate();
    return true;
  }
  return false;
}

RegimeMonitor::RegimeMonitor(CusumConfig cfg, EventLog* log)
    : gini_(cfg), peak_(cfg), log_(log) {}

std::optional<RegimeMonitor::Alarm> RegimeMonitor::update(const KpiSnapshot& kpi,
                                                          std::uint64_t step) {
  const bool g = gini_.update(kpi.gini, step);
  const bool p = peak_.update(kpi.peak_demand_mbps, step);
  if (!g && !p) return std::nullopt;
  Alarm alarm{step, g ? (p ? "gini+peak_demand" : "gini") : "peak_demand"};
  if (log_) {
    std::ostringstream detail;
    detail << "{\"kpi\":\"" << alarm.kpi << "\"}";
    log_->add(step, "cusum_alarm", detail.str());
  }
  return alarm;
}

}  // namespace satsched
