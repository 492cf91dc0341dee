#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace satsched {

struct KpiSnapshot;
class EventLog;

struct CusumConfig {
  int window = 10;
  double threshold_sigmas = 1.0;
  // Slack delta in units of the window std estimate; the drift has to exceed
  // this per step before the statistic accumulates.
  double slack = 0.5;
  std::uint64_t min_interval_steps = 50;

  bool operator==(const CusumConfig&) const = default;
};

struct CusumState {
  double statistic = 0.0;
  double mean_est = 0.0;
  double std_est = 0.0;
  std::optional<std::uint64_t> last_alarm_step;
};

// One-sided recursion: S_t = max(0, S_{t-1} + (x - mu0) - slack*sigma).
// Alarms when S_t exceeds threshold_sigmas*sigma, at least min_interval_steps
// after the previous alarm; the statistic resets on alarm. Re-estimation of
// mu0/sigma is the owner's job (see CusumDetector).
bool cusum_update(CusumState& state, double x, std::uint64_t step, const CusumConfig& cfg);

// Two-sided detector over one KPI stream: a mirrored recursion on -x catches
// downward shifts. mu0/sigma come from the trailing window and are frozen
// while either statistic is nonzero so a shift in progress does not get
// absorbed into the baseline.
class CusumDetector {
 public:
  explicit CusumDetector(CusumConfig cfg = {});

  bool update(double x, std::uint64_t step);

  const CusumState& positive_side() const { return pos_; }
  const CusumState& negative_side() const { return neg_; }
  bool warmed_up() const { return static_cast<int>(window_.size()) >= cfg_.window; }

 private:
  void reestimate();

  CusumConfig cfg_;
  CusumState pos_, neg_;
  std::deque<double> window_;
  std::optional<std::uint64_t> last_alarm_;
};

// One detector per monitored KPI (spatial gini and peak demand); the regime
// change signal is the OR of the per-KPI alarms.
class RegimeMonitor {
 public:
  explicit RegimeMonitor(CusumConfig cfg = {}, EventLog* log = nullptr);

  struct Alarm {
    std::uint64_t step;
    std::string kpi;
  };

  std::optional<Alarm> update(const KpiSnapshot& kpi, std::uint64_t step);

 private:
  CusumDetector gini_, peak_;
  EventLog* log_;
};

}  // namespace satsched
