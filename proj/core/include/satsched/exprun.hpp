#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satsched/anchors.hpp"
#include "satsched/config.hpp"
#include "satsched/intent.hpp"
#include "satsched/ppo.hpp"
#include "satsched/probe.hpp"

namespace satsched {

enum class PresetName {
  compare_known,
  generalize_novel,
  ablation,
  dilemma,
  path_c,
  probe_all,
  rag_eval,
  intent_phases
};

const char* preset_name_str(PresetName p);
PresetName preset_from_string(const std::string& name);

struct ExperimentPreset {
  PresetName name = PresetName::compare_known;
  std::vector<std::uint64_t> seeds = {42, 123, 456};
  std::uint64_t steps = 50000;
  RegimeSchedule schedule;
};

// Per-weight trajectory statistics plus the L-inf switch count.
struct OscillationStats {
  struct PerWeight {
    double mean = 0.0, std = 0.0, cv = 0.0, min = 0.0, max = 0.0;
    bool cv_defined = true;
  };
  std::array<PerWeight, kNumWeights> per_weight;
  std::uint64_t switch_count = 0;
};

OscillationStats oscillation_stats(const std::vector<std::array<double, kNumWeights>>& trajectory,
                                   double switch_threshold = 0.01);

// One table cell: mean +/- std over seeds of the per-seed aggregates.
struct AggregateCell {
  std::string label;
  double rate_mean = 0.0, rate_std = 0.0;
  double outage_mean = 0.0;
  double fairness_mean = 0.0;
  double switches_mean = 0.0;
  std::uint64_t seeds = 0;
};

struct PresetReport {
  std::string preset;
  std::string config_echo;  // full config JSON for reproducibility
  std::vector<AggregateCell> cells;
  std::vector<std::string> missing;  // "<label>/seed" for failed runs
  std::string extra_json;  // preset-specific payload (probe maps, intent phases, ...)
  int schema_version = 1;

  std::string to_json() const;
  std::string to_csv() const;
};

struct PresetOutcome {
  PresetReport report;
  // (label, seed) -> metrics, in deterministic order.
  std::vector<std::pair<std::string, RunMetrics>> runs;
};

// Runs a preset: fans runs out over a bounded worker pool, aggregates
// per-seed means first and across seeds second, and writes metrics.json, a
// CSV table and per-run JSONL traces under out_dir (when non-empty).
PresetOutcome run_preset(const ExperimentPreset& preset, const RootConfig& cfg,
                         const std::string& out_dir);

// Plot-data emission: a CSV series plus a plain SVG line chart per tracked
// quantity; multiple runs overlay.
void emit_plots(const std::vector<std::string>& run_dirs, const std::string& out_dir);

// Architect wired per config (including the guard wrapper). `schedule` feeds
// the oracle variant; anchors may be null.
std::unique_ptr<Architect> build_architect(const RootConfig& cfg, ArchitectKind kind,
                                           const RegimeSchedule& schedule,
                                           const AnchorStore* anchors, EventLog* log);

// Phase slice [start, end) of a run's series, as the intent scorer wants it.
PhaseMetrics slice_phase_metrics(const RunMetrics& m, std::uint64_t start, std::uint64_t end,
                                 int num_beams);

}  // namespace satsched
