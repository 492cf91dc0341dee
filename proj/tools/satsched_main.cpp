// Command-line front end: experiment presets, probing, anchor store
// maintenance and plot emission.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "satsched/exprun.hpp"

namespace fs = std::filesystem;
using namespace satsched;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::uint64_t steps = 0;
};

RootConfig load_root(const GlobalArgs& g) {
  RootConfig cfg;
  if (!g.config_path.empty()) {
    auto loaded = load_config(g.config_path);
    for (const auto& w : loaded.warnings) std::cerr << "config warning: " << w << "\n";
    cfg = loaded.config;
  }
  if (!g.seeds.empty()) cfg.seeds = g.seeds;
  if (g.steps > 0) cfg.steps = g.steps;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  return cfg;
}

int run_named_preset(PresetName name, const GlobalArgs& g) {
  const RootConfig cfg = load_root(g);
  ExperimentPreset preset;
  preset.name = name;
  preset.seeds = cfg.seeds;
  preset.steps = cfg.steps;
  const auto outcome = run_preset(preset, cfg, cfg.out_dir);
  std::cout << outcome.report.to_csv();
  if (!outcome.report.missing.empty()) {
    for (const auto& m : outcome.report.missing) std::cerr << "missing: " << m << "\n";
    return 2;
  }
  std::cout << "report: " << (fs::path(cfg.out_dir) / preset_name_str(name) / "metrics.json").string()
            << "\n";
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-beam LEO scheduling experiments: PPO scheduler, adaptive reward "
               "architects, CUSUM regime detection, causal probes and anchor retrieval"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global flags after the subcommand too

  GlobalArgs g;
  app.add_option("--config", g.config_path, "JSON config file (defaults apply when omitted)");
  app.add_option("--out-dir", g.out_dir, "output directory for reports and traces");
  app.add_option("--seeds", g.seeds, "run seeds (overrides config)");
  app.add_option("--steps", g.steps, "training steps per run (overrides config)");

  app.add_subcommand("compare", "architect comparison on the four known regimes");
  app.add_subcommand("generalize", "rule/MLP/simulated-LLM architects on the held-out regimes");
  app.add_subcommand("ablate", "component ablation table on known regimes");
  app.add_subcommand("dilemma", "constant weights vs per-regime switching, paired seeds");
  app.add_subcommand("path-c", "adds the throttled+interpolated switching mode");

  auto* probe_cmd = app.add_subcommand("probe", "single-weight +/-delta causal probe");
  std::string probe_regime = "polar_handover";
  double probe_delta = 0.2;
  int probe_rounds = 3;
  probe_cmd->add_option("--regime", probe_regime, "regime to probe");
  probe_cmd->add_option("--delta", probe_delta, "relative perturbation");
  probe_cmd->add_option("--rounds", probe_rounds, "independent rounds");

  auto* anchors_cmd = app.add_subcommand("anchors", "anchor store maintenance");
  anchors_cmd->require_subcommand(1);
  auto* ingest_cmd = anchors_cmd->add_subcommand("ingest", "fold probe reports into the store");
  std::vector<std::string> ingest_files;
  ingest_cmd->add_option("--probe", ingest_files, "probe report JSON files")->required();
  auto* query_cmd = anchors_cmd->add_subcommand("query", "score anchors against a KPI vector");
  std::vector<double> query_kpi;
  int query_k = 5;
  query_cmd->add_option("--kpi", query_kpi, "5 normalized KPI values")->expected(5)->required();
  query_cmd->add_option("--k", query_k, "number of anchors");

  app.add_subcommand("rag-eval", "anchor-grounded vs unanchored proposal clamping");

  auto* intent_cmd = app.add_subcommand("intent-run", "operator intent phases over a run");
  std::string intent_schedule;
  intent_cmd->add_option("--schedule", intent_schedule, "intent schedule JSON file");

  auto* plot_cmd = app.add_subcommand("plot", "emit CSV + SVG series from run traces");
  std::vector<std::string> plot_runs;
  plot_cmd->add_option("--runs", plot_runs, "run directories containing trace.jsonl")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("compare")) return run_named_preset(PresetName::compare_known, g);
    if (app.got_subcommand("generalize")) {
      return run_named_preset(PresetName::generalize_novel, g);
    }
    if (app.got_subcommand("ablate")) return run_named_preset(PresetName::ablation, g);
    if (app.got_subcommand("dilemma")) return run_named_preset(PresetName::dilemma, g);
    if (app.got_subcommand("path-c")) return run_named_preset(PresetName::path_c, g);
    if (app.got_subcommand("rag-eval")) return run_named_preset(PresetName::rag_eval, g);

    if (app.got_subcommand("probe")) {
      RootConfig cfg = load_root(g);
      const RegimeLabel regime = regime_from_string(probe_regime);
      ProbeSpec spec;
      spec.regime = regime;
      spec.base_weights = cfg.architect.profiles.mixed;
      spec.delta = probe_delta;
      spec.steps = cfg.steps;
      spec.rounds = probe_rounds;
      spec.seeds = cfg.seeds;
      ProbeContext ctx = default_probe_context(cfg.env, regime, cfg.ppo);
      ctx.cusum = cfg.cusum;
      ctx.parallelism = cfg.parallelism;
      const ProbeReport report = run_probe(spec, ctx);
      fs::create_directories(cfg.out_dir);
      const std::string stem = "probe_" + std::string(regime_name(regime));
      std::ofstream((fs::path(cfg.out_dir) / (stem + ".json"))) << report.to_json();
      std::ofstream((fs::path(cfg.out_dir) / (stem + ".csv"))) << report.to_csv();
      std::cout << report.to_csv();
      const auto best = strongest_axis(report.results);
      if (best) {
        std::cout << "strongest axis: " << best->weight_name
                  << (best->direction > 0 ? " (+" : " (-") << "delta), "
                  << best->delta_rate_mbps << " Mbps\n";
      } else {
        std::cout << "strongest axis: none (no positive delta)\n";
      }
      return 0;
    }

    if (app.got_subcommand("anchors")) {
      RootConfig cfg = load_root(g);
      AnchorStore store(0.5);
      if (fs::exists(cfg.anchor_store_path)) {
        store = AnchorStore::load_jsonl(cfg.anchor_store_path);
      }
      if (anchors_cmd->got_subcommand("ingest")) {
        EventLog log;
        std::vector<AnchorEntry> records;
        for (const auto& file : ingest_files) {
          const auto j = nlohmann::json::parse(read_file(file));
          const RegimeLabel regime = regime_from_string(j.at("regime").get<std::string>());
          const KpiSnapshot centroid = regime_kpi_centroid(cfg.env, regime, 1);
          const auto kpi = cfg.scaler.normalize(centroid);
          WeightVector base;
          for (std::size_t i = 0; i < kNumWeights; ++i) {
            base[i] = j.at("base_weights")[i].get<double>();
          }
          AnchorEntry baseline{kpi, base, j.at("baseline_rate_mbps").get<double>(),
                               "probe_baseline:" + std::string(regime_name(regime))};
          records.push_back(baseline);
          const double delta = j.at("delta").get<double>();
          for (const auto& r : j.at("results")) {
            if (!r.at("complete").get<bool>()) continue;
            WeightVector w = base;
            const std::string name = r.at("weight").get<std::string>();
            const int dir = r.at("direction").get<std::string>() == "+" ? 1 : -1;
            for (std::size_t i = 0; i < kNumWeights; ++i) {
              if (name == kWeightNames[i]) w[i] *= (1.0 + dir * delta);
            }
            w = clamp_weights(w);
            records.push_back({kpi, w,
                               j.at("baseline_rate_mbps").get<double>() +
                                   r.at("delta_rate_mbps").get<double>(),
                               "probe:" + std::string(regime_name(regime)) + ":" + name});
          }
        }
        const std::size_t applied = ingest_records(store, records, &log);
        store.save_jsonl(cfg.anchor_store_path);
        std::cout << "ingested " << applied << " records, store size " << store.size() << " -> "
                  << cfg.anchor_store_path << "\n";
        return 0;
      }
      if (anchors_cmd->got_subcommand("query")) {
        std::array<double, 5> kpi{};
        for (std::size_t i = 0; i < 5; ++i) kpi[i] = query_kpi[i];
        const auto ranked = store.top_k(kpi, static_cast<std::size_t>(query_k));
        for (const auto& r : ranked) {
          std::cout << r.score << "  " << to_json_array(r.entry->weights) << "  "
                    << r.entry->performance_mbps << " Mbps  [" << r.entry->source << "]\n";
        }
        return 0;
      }
    }

    if (app.got_subcommand("intent-run")) {
      RootConfig cfg = load_root(g);
      if (!intent_schedule.empty()) cfg.intent_schedule_path = intent_schedule;
      ExperimentPreset preset;
      preset.name = PresetName::intent_phases;
      preset.seeds = cfg.seeds;
      preset.steps = cfg.steps;
      const auto outcome = run_preset(preset, cfg, cfg.out_dir);
      std::cout << outcome.report.to_csv();
      return outcome.report.missing.empty() ? 0 : 2;
    }

    if (app.got_subcommand("plot")) {
      const RootConfig cfg = load_root(g);
      emit_plots(plot_runs, cfg.out_dir.empty() ? "plots" : cfg.out_dir);
      std::cout << "plots written to " << (cfg.out_dir.empty() ? "plots" : cfg.out_dir) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
