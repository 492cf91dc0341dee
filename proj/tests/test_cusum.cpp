#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "satsched/cusum.hpp"
#include "satsched/env.hpp"
#include "satsched/events.hpp"
#include "satsched/rng.hpp"

using namespace satsched;

TEST_CASE("one-sided recursion matches an independent trace") {
  CusumConfig cfg;
  cfg.slack = 0.5;
  CusumState state;
  state.mean_est = 2.0;
  state.std_est = 1.0;

  // Reference recursion computed separately.
  const std::vector<double> xs = {2.0, 2.5, 4.0, 1.0, 5.0, 5.0, 2.0};
  double ref = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ref = std::max(0.0, ref + (xs[i] - 2.0) - 0.5 * 1.0);
    CusumState before = state;
    const bool alarm = cusum_update(state, xs[i], i, cfg);
    if (!alarm) {
      CHECK(state.statistic == doctest::Approx(ref).epsilon(1e-12));
    } else {
      CHECK(state.statistic == 0.0);
      ref = 0.0;
    }
    CHECK(state.statistic >= 0.0);
    (void)before;
  }
}

TEST_CASE("constant stream at the mean never alarms and stays at zero") {
  CusumConfig cfg;
  CusumState state;
  state.mean_est = 7.0;
  state.std_est = 0.0;
  for (std::uint64_t t = 0; t < 5000; ++t) {
    CHECK_FALSE(cusum_update(state, 7.0, t, cfg));
    CHECK(state.statistic == 0.0);
  }
}

TEST_CASE("detector: zero false alarms on a noise-free constant stream") {
  CusumDetector det;
  for (std::uint64_t t = 0; t < 10000; ++t) {
    CHECK_FALSE(det.update(3.25, t));
  }
}

TEST_CASE("a +5 sigma step change alarms within 20 steps") {
  CusumConfig cfg;
  CusumDetector det(cfg);
  Rng rng(2);
  std::uint64_t t = 0;
  for (; t < 200; ++t) det.update(10.0 + rng.normal(0.0, 1.0), t);
  bool alarmed = false;
  std::uint64_t alarm_at = 0;
  for (std::uint64_t k = 0; k < 20 && !alarmed; ++k, ++t) {
    alarmed = det.update(15.0 + rng.normal(0.0, 1.0), t);
    alarm_at = k;
  }
  CHECK(alarmed);
  CHECK(alarm_at < 20);
}

TEST_CASE("downward shifts are caught by the mirrored side") {
  CusumDetector det;
  Rng rng(3);
  std::uint64_t t = 0;
  for (; t < 200; ++t) det.update(10.0 + rng.normal(0.0, 1.0), t);
  bool alarmed = false;
  for (std::uint64_t k = 0; k < 20 && !alarmed; ++k, ++t) {
    alarmed = det.update(5.0 + rng.normal(0.0, 1.0), t);
  }
  CHECK(alarmed);
}

TEST_CASE("minimum interval suppresses the second of two forced shifts") {
  CusumConfig cfg;
  cfg.min_interval_steps = 50;
  CusumDetector det(cfg);
  Rng rng(4);
  std::uint64_t t = 0;
  for (; t < 100; ++t) det.update(10.0 + rng.normal(0.0, 0.5), t);

  // First shift: must alarm.
  bool first = false;
  std::uint64_t first_at = 0;
  for (std::uint64_t k = 0; k < 30 && !first; ++k, ++t) {
    first = det.update(20.0 + rng.normal(0.0, 0.5), t);
    first_at = t;
  }
  REQUIRE(first);

  // Second forced shift 10 steps later: suppressed by the interval.
  std::vector<std::uint64_t> alarms;
  for (std::uint64_t k = 0; k < 10; ++k, ++t) det.update(20.0 + rng.normal(0.0, 0.5), t);
  for (std::uint64_t k = 0; k < 120; ++k, ++t) {
    if (det.update(45.0 + rng.normal(0.0, 0.5), t)) alarms.push_back(t);
  }
  for (const auto a : alarms) CHECK(a - first_at >= cfg.min_interval_steps);
}

TEST_CASE("alarm gaps never violate min_interval on random walks") {
  CusumConfig cfg;
  cfg.min_interval_steps = 50;
  CusumDetector det(cfg);
  Rng rng(5);
  double level = 10.0;
  std::vector<std::uint64_t> alarms;
  for (std::uint64_t t = 0; t < 20000; ++t) {
    if (t % 500 == 0) level += rng.uniform(-8.0, 8.0);
    if (det.update(level + rng.normal(0.0, 1.0), t)) alarms.push_back(t);
    CHECK(det.positive_side().statistic >= 0.0);
    CHECK(det.negative_side().statistic >= 0.0);
  }
  for (std::size_t i = 1; i < alarms.size(); ++i) {
    CHECK(alarms[i] - alarms[i - 1] >= cfg.min_interval_steps);
  }
  CHECK(alarms.size() > 3);  // the walk does shift
}

TEST_CASE("regime monitor ORs the gini and peak detectors and logs alarms") {
  EventLog log;
  RegimeMonitor monitor({}, &log);
  // Noise-free warmup on both streams: neither detector may fire, so the
  // eventual alarm is attributable to the stream that moved.
  std::uint64_t t = 0;
  for (; t < 100; ++t) {
    KpiSnapshot k;
    k.gini = 0.2;
    k.peak_demand_mbps = 60.0;
    monitor.update(k, t);
  }
  CHECK(log.count("cusum_alarm") == 0);
  bool fired = false;
  std::string which;
  for (std::uint64_t k = 0; k < 25 && !fired; ++k, ++t) {
    KpiSnapshot shifted;
    shifted.gini = 0.2;
    shifted.peak_demand_mbps = 190.0;  // only peak moves
    const auto alarm = monitor.update(shifted, t);
    if (alarm) {
      fired = true;
      which = alarm->kpi;
    }
  }
  CHECK(fired);
  CHECK(which == "peak_demand");
  CHECK(log.count("cusum_alarm") == 1);
}
