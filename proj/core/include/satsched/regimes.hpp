#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace satsched {

// Four canonical traffic regimes plus three held-out ones used only for
// generalization experiments.
enum class RegimeLabel { urban, maritime, disaster, mixed, iot_burst, polar_handover, hot_cold };

inline constexpr int kNumRegimes = 7;

const char* regime_name(RegimeLabel r);
RegimeLabel regime_from_string(const std::string& name);
bool regime_is_novel(RegimeLabel r);

// Tunable shape parameters for the held-out regimes. The sinusoid swings
// wide enough that a frozen allocation loses real traffic over a half-period.
struct RegimeParams {
  double sinusoid_period_steps = 400.0;  // polar_handover
  double sinusoid_base_mbps = 28.0;
  double sinusoid_amp_mbps = 50.0;
  double iot_burst_prob = 0.2;
  double iot_burst_factor = 4.0;
  int hot_beam_count = 3;

  bool operator==(const RegimeParams&) const = default;
};

// 19-beam hexagonal layout: beam 0 is the center, 1..6 the inner ring,
// 7..18 the outer ring. Larger layouts extend the outer ring.
int beam_ring(int beam, int num_beams);
bool beam_is_center(int beam, int num_beams);

// Deterministic per-beam demand mean at a given step (no sampling noise).
// This is the quantity the sinusoidal regime oscillates.
double regime_mean_demand(RegimeLabel regime, std::uint64_t seed, int beam, std::uint64_t step,
                          int num_beams, const RegimeParams& params = {});

// Draw the demand vector for one step. Pure in (regime, seed, step): the same
// triple always yields the same vector.
std::vector<double> sample_demand(RegimeLabel regime, std::uint64_t seed, std::uint64_t step,
                                  int num_beams, const RegimeParams& params = {});

// A cyclic (regime, duration) schedule; an empty schedule pins `fallback`.
struct RegimeSchedule {
  struct Phase {
    RegimeLabel regime = RegimeLabel::mixed;
    std::uint64_t duration = 2000;
  };
  std::vector<Phase> phases;

  RegimeLabel at(std::uint64_t step) const;
  std::uint64_t cycle_length() const;

  static RegimeSchedule single(RegimeLabel r);
  static RegimeSchedule known_cycle(std::uint64_t phase_steps);
  static RegimeSchedule novel_cycle(std::uint64_t phase_steps);
};

}  // namespace satsched
