#include "satsched/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "satsched/rng.hpp"

namespace satsched {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t demand_stream(std::uint64_t seed, RegimeLabel regime, std::uint64_t step) {
  std::uint64_t h = Rng::mix(seed, static_cast<std::uint64_t>(regime) + 1);
  return Rng::mix(h, step + 0x51ed2701);
}

// Step-independent stream for persistent per-run structure (hot beams,
// disaster cells).
std::uint64_t structure_stream(std::uint64_t seed, RegimeLabel regime) {
  return Rng::mix(Rng::mix(seed, 0xabcd1234), static_cast<std::uint64_t>(regime) + 101);
}

std::vector<int> pick_distinct_beams(Rng& rng, int count, int num_beams) {
  std::vector<int> all(num_beams);
  for (int i = 0; i < num_beams; ++i) all[i] = i;
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_beams - i)));
    std::swap(all[i], all[j]);
  }
  all.resize(count);
  return all;
}
}  // namespace

const char* regime_name(RegimeLabel r) {
  switch (r) {
    case RegimeLabel::urban: return "urban";
    case RegimeLabel::maritime: return "maritime";
    case RegimeLabel::disaster: return "disaster";
    case RegimeLabel::mixed: return "mixed";
    case RegimeLabel::iot_burst: return "iot_burst";
    case RegimeLabel::polar_handover: return "polar_handover";
    case RegimeLabel::hot_cold: return "hot_cold";
  }
  return "?";
}

RegimeLabel regime_from_string(const std::string& name) {
  for (int i = 0; i < kNumRegimes; ++i) {
    const auto r = static_cast<RegimeLabel>(i);
    if (name == regime_name(r)) return r;
  }
  throw std::invalid_argument("unknown regime: " + name);
}

bool regime_is_novel(RegimeLabel r) {
  return r == RegimeLabel::iot_burst || r == RegimeLabel::polar_handover ||
         r == RegimeLabel::hot_cold;
}

int beam_ring(int beam, int num_beams) {
  (void)num_beams;
  if (beam == 0) return 0;
  if (beam <= 6) return 1;
  return 2;
}

bool beam_is_center(int beam, int num_beams) { return beam_ring(beam, num_beams) <= 1; }

double regime_mean_demand(RegimeLabel regime, std::uint64_t seed, int beam, std::uint64_t step,
                          int num_beams, const RegimeParams& params) {
  switch (regime) {
    case RegimeLabel::urban:
      return beam_is_center(beam, num_beams) ? 60.0 : 20.0;
    case RegimeLabel::maritime:
      return 10.0;
    case RegimeLabel::disaster: {
      Rng rng(structure_stream(seed, regime));
      const int affected = 1 + static_cast<int>(rng.uniform_int(3));
      const auto cells = pick_distinct_beams(rng, affected, num_beams);
      const bool hit = std::find(cells.begin(), cells.end(), beam) != cells.end();
      return hit ? 200.0 : 20.0;
    }
    case RegimeLabel::mixed:
      return 30.0;
    case RegimeLabel::iot_burst:
      return 5.0 * (1.0 + params.iot_burst_prob * (params.iot_burst_factor - 1.0));
    case RegimeLabel::polar_handover: {
      const double phase = beam_ring(beam, num_beams) * kTwoPi / 3.0;
      const double s = std::sin(kTwoPi * static_cast<double>(step) / params.sinusoid_period_steps +
                                phase);
      return std::max(0.0, params.sinusoid_base_mbps + params.sinusoid_amp_mbps * s);
    }
    case RegimeLabel::hot_cold: {
      Rng rng(structure_stream(seed, regime));
      const auto hot = pick_distinct_beams(rng, params.hot_beam_count, num_beams);
      const bool is_hot = std::find(hot.begin(), hot.end(), beam) != hot.end();
      return is_hot ? 100.0 : 3.0;
    }
  }
  return 0.0;
}

std::vector<double> sample_demand(RegimeLabel regime, std::uint64_t seed, std::uint64_t step,
                                  int num_beams, const RegimeParams& params) {
  Rng rng(demand_stream(seed, regime, step));
  std::vector<double> demand(static_cast<std::size_t>(num_beams), 0.0);

  switch (regime) {
    case RegimeLabel::urban:
      for (int b = 0; b < num_beams; ++b) {
        demand[b] = beam_is_center(b, num_beams) ? rng.uniform(40.0, 80.0)
                                                 : rng.uniform(10.0, 30.0);
      }
      break;
    case RegimeLabel::maritime:
      for (int b = 0; b < num_beams; ++b) demand[b] = rng.uniform(5.0, 15.0);
      break;
    case RegimeLabel::disaster: {
      Rng structure(structure_stream(seed, regime));
      const int affected = 1 + static_cast<int>(structure.uniform_int(3));
      const auto cells = pick_distinct_beams(structure, affected, num_beams);
      for (int b = 0; b < num_beams; ++b) {
        const bool hit = std::find(cells.begin(), cells.end(), b) != cells.end();
        demand[b] = hit ? rng.uniform(160.0, 240.0) : rng.uniform(10.0, 30.0);
      }
      break;
    }
    case RegimeLabel::mixed:
      for (int b = 0; b < num_beams; ++b) demand[b] = rng.uniform(20.0, 40.0);
      break;
    case RegimeLabel::iot_burst:
      for (int b = 0; b < num_beams; ++b) {
        double d = rng.uniform(2.0, 8.0);
        if (rng.bernoulli(params.iot_burst_prob)) d *= params.iot_burst_factor;
        demand[b] = d;
      }
      break;
    case RegimeLabel::polar_handover:
      for (int b = 0; b < num_beams; ++b) {
        const double mean = regime_mean_demand(regime, seed, b, step, num_beams, params);
        demand[b] = std::max(0.0, mean + rng.uniform(-5.0, 5.0));
      }
      break;
    case RegimeLabel::hot_cold: {
      Rng structure(structure_stream(seed, regime));
      const auto hot = pick_distinct_beams(structure, params.hot_beam_count, num_beams);
      for (int b = 0; b < num_beams; ++b) {
        const bool is_hot = std::find(hot.begin(), hot.end(), b) != hot.end();
        demand[b] = is_hot ? rng.uniform(80.0, 120.0) : rng.uniform(1.0, 5.0);
      }
      break;
    }
  }
  return demand;
}

RegimeLabel RegimeSchedule::at(std::uint64_t step) const {
  if (phases.empty()) return RegimeLabel::mixed;
  const std::uint64_t cycle = cycle_length();
  std::uint64_t t = step % cycle;
  for (const auto& p : phases) {
    if (t < p.duration) return p.regime;
    t -= p.duration;
  }
  return phases.back().regime;
}

std::uint64_t RegimeSchedule::cycle_length() const {
  std::uint64_t total = 0;
  for (const auto& p : phases) total += p.duration;
  return total == 0 ? 1 : total;
}

RegimeSchedule RegimeSchedule::single(RegimeLabel r) {
  RegimeSchedule s;
  s.phases.push_back({r, 1});
  return s;
}

RegimeSchedule RegimeSchedule::known_cycle(std::uint64_t phase_steps) {
  RegimeSchedule s;
  for (auto r : {RegimeLabel::urban, RegimeLabel::maritime, RegimeLabel::disaster,
                 RegimeLabel::mixed}) {
    s.phases.push_back({r, phase_steps});
  }
  return s;
}

RegimeSchedule RegimeSchedule::novel_cycle(std::uint64_t phase_steps) {
  RegimeSchedule s;
  for (auto r : {RegimeLabel::iot_burst, RegimeLabel::polar_handover, RegimeLabel::hot_cold}) {
    s.phases.push_back({r, phase_steps});
  }
  return s;
}

}  // namespace satsched
