#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "satsched/architect.hpp"
#include "satsched/events.hpp"
#include "satsched/reward.hpp"

namespace satsched {

class LlmClient;

enum class IntentCategory { throughput, emergency, fairness, energy, mixed };

const char* intent_category_name(IntentCategory c);
std::optional<IntentCategory> intent_category_from_string(const std::string& name);

// A named objective with a multiplicative weight bias; composing with the
// tactical architect is component-wise multiply followed by the clamp.
struct ObjectiveProfile {
  IntentCategory category = IntentCategory::mixed;
  WeightVector weight_bias{1.0, 1.0, 1.0, 1.0, 1.0};
  std::string description;
};

ObjectiveProfile default_profile(IntentCategory c);

struct IntentPhase {
  std::string command_text;
  std::uint64_t start_step = 0;
  ObjectiveProfile profile;
};

// Keyword parser: throughput/rate, emergency/disaster/outage, fair/equal,
// energy/power/switch; anything else falls through to mixed.
ObjectiveProfile parse_intent_rule(const std::string& text);

// LLM parser: asks for {"profile": name, "weight_bias": [5]} and validates;
// any failure falls back to the rule parser with a logged event.
ObjectiveProfile parse_intent_llm(const std::string& text, LlmClient& client,
                                  EventLog* log = nullptr);

// Normalization constants for the satisfaction score; the reference rate is
// what counts as "full marks" for a throughput phase.
struct SatisfactionConfig {
  double reference_rate_mbps = 400.0;
  double max_switching_cost = 2.0;  // L1 bound for a simplex allocation

  bool operator==(const SatisfactionConfig&) const = default;
};

struct PhaseMetrics {
  double mean_rate_mbps = 0.0;
  double mean_outage_rate = 0.0;  // outage count / num_beams, averaged
  double mean_jain = 0.0;
  double mean_switching = 0.0;
  std::uint64_t steps = 0;
};

// Phase satisfaction in [0,1]: throughput -> rate vs reference; emergency ->
// 1 - outage rate; fairness -> mean Jain; energy -> 1 - normalized switching;
// mixed -> equal blend. Empty windows throw.
double satisfaction(const ObjectiveProfile& profile, const PhaseMetrics& metrics,
                    const SatisfactionConfig& cfg = {});

// Intent schedules are JSON: [{"start_step": N, "command": "..."}].
std::vector<IntentPhase> load_intent_schedule(const std::string& path);
std::vector<IntentPhase> parse_intent_schedule(const std::string& json_text);

// The default four-phase operator script, spread evenly over a run.
std::vector<IntentPhase> default_intent_schedule(std::uint64_t total_steps);

// Three-timescale wiring: the strategic phase bias multiplies the tactical
// architect's output component-wise, then the clamp applies.
class IntentBiasArchitect final : public Architect {
 public:
  IntentBiasArchitect(std::unique_ptr<Architect> inner, std::vector<IntentPhase> phases);
  WeightVector propose(const KpiSnapshot& kpi, std::uint64_t step, Rng& rng) override;
  std::string name() const override { return "intent(" + inner_->name() + ")"; }
  const IntentPhase& phase_at(std::uint64_t step) const;
  const std::vector<IntentPhase>& phases() const { return phases_; }

 private:
  std::unique_ptr<Architect> inner_;
  std::vector<IntentPhase> phases_;
};

}  // namespace satsched
