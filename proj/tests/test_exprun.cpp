#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "satsched/exprun.hpp"

using namespace satsched;
namespace fs = std::filesystem;

TEST_CASE("oscillation stats: constant trajectory") {
  std::vector<std::array<double, kNumWeights>> traj(100, {1.0, 0.5, 0.3, 0.5, 0.8});
  const auto s = oscillation_stats(traj);
  for (std::size_t w = 0; w < kNumWeights; ++w) {
    CHECK(s.per_weight[w].cv == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.per_weight[w].std == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(s.switch_count == 0);
}

TEST_CASE("oscillation stats: alternating two-point trajectory") {
  std::vector<std::array<double, kNumWeights>> traj;
  for (int i = 0; i < 1000; ++i) {
    traj.push_back({1.0, i % 2 == 0 ? 0.005 : 0.50, 0.3, 0.5, 0.8});
  }
  const auto s = oscillation_stats(traj);
  // Two-point distribution: mean .2525, std .2475, CV = .2475/.2525.
  CHECK(s.per_weight[1].mean == doctest::Approx(0.2525).epsilon(1e-9));
  CHECK(s.per_weight[1].std == doctest::Approx(0.2475).epsilon(1e-9));
  CHECK(s.per_weight[1].cv == doctest::Approx(0.2475 / 0.2525).epsilon(1e-9));
  CHECK(s.per_weight[1].min == 0.005);
  CHECK(s.per_weight[1].max == 0.50);
  CHECK(s.switch_count == 999);  // every step exceeds the 0.01 threshold
}

TEST_CASE("oscillation stats: narrow band has CV < 0.25") {
  Rng rng(3);
  std::vector<std::array<double, kNumWeights>> traj;
  for (int i = 0; i < 2000; ++i) {
    traj.push_back({1.0, rng.uniform(0.94, 1.57), 0.3, 0.5, 0.8});
  }
  const auto s = oscillation_stats(traj);
  CHECK(s.per_weight[1].cv < 0.25);
  CHECK(s.per_weight[1].cv > 0.0);
}

TEST_CASE("oscillation stats: zero-mean component is flagged undefined") {
  std::vector<std::array<double, kNumWeights>> traj(10, {0.0, 1.0, 1.0, 1.0, 1.0});
  const auto s = oscillation_stats(traj);
  CHECK_FALSE(s.per_weight[0].cv_defined);
  CHECK(s.per_weight[1].cv_defined);
  CHECK_THROWS(oscillation_stats({}));
}

TEST_CASE("phase slicing averages the right window") {
  RunMetrics m;
  for (int i = 0; i < 100; ++i) {
    m.sum_rate_mbps.push_back(i < 50 ? 100.0 : 300.0);
    m.outage_count.push_back(i < 50 ? 19.0 : 0.0);
    m.fairness.push_back(1.0);
    m.switching_cost.push_back(0.5);
    m.reward.push_back(0.0);
    m.weight_trajectory.push_back({1, 1, 1, 1, 1});
  }
  const auto first = slice_phase_metrics(m, 0, 50, 19);
  CHECK(first.mean_rate_mbps == doctest::Approx(100.0));
  CHECK(first.mean_outage_rate == doctest::Approx(1.0));
  const auto second = slice_phase_metrics(m, 50, 100, 19);
  CHECK(second.mean_rate_mbps == doctest::Approx(300.0));
  CHECK(second.mean_outage_rate == doctest::Approx(0.0));
  CHECK(second.steps == 50);
  const auto empty = slice_phase_metrics(m, 100, 100, 19);
  CHECK(empty.steps == 0);
}

TEST_CASE("emit_plots writes CSV and SVG, and errors on missing dirs") {
  const fs::path dir = "test_plot_run";
  fs::create_directories(dir);
  {
    std::ofstream trace(dir / "trace.jsonl");
    for (int i = 0; i < 50; ++i) {
      trace << R"({"step":)" << i << R"(,"rate_mbps":)" << 100 + i << R"(,"outage":0,)"
            << R"("fairness":0.8,"reward":)" << 0.01 * i
            << R"(,"weights":[1.0,1.0,0.3,0.5,0.8]})" << "\n";
    }
  }
  emit_plots({dir.string()}, "test_plot_out");
  CHECK(fs::exists("test_plot_out/rate_mbps.csv"));
  CHECK(fs::exists("test_plot_out/rate_mbps.svg"));
  CHECK(fs::exists("test_plot_out/weights.svg"));

  // Overlay of two runs.
  emit_plots({dir.string(), dir.string()}, "test_plot_out2");
  std::ifstream csv("test_plot_out2/rate_mbps.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "index,test_plot_run,test_plot_run");

  CHECK_THROWS_WITH_AS(emit_plots({"no_such_run_dir"}, "test_plot_out3"),
                       doctest::Contains("no_such_run_dir"), std::runtime_error);

  fs::remove_all(dir);
  fs::remove_all("test_plot_out");
  fs::remove_all("test_plot_out2");
  fs::remove_all("test_plot_out3");
}

TEST_CASE("rag_eval preset demonstrates anchor-grounded admission") {
  RootConfig cfg;
  const fs::path store_path = "test_rag_anchors.jsonl";
  {
    AnchorStore store(0.5);
    for (auto regime : {RegimeLabel::iot_burst, RegimeLabel::polar_handover,
                        RegimeLabel::hot_cold}) {
      AnchorEntry e;
      e.kpi = cfg.scaler.normalize(regime_kpi_centroid(cfg.env, regime, 1));
      e.weights = WeightVector{1.0, 1.0, regime == RegimeLabel::iot_burst ? 0.3 : 0.95, 0.5,
                               0.8};
      if (regime == RegimeLabel::iot_burst) e.weights.sum_rate = 1.4;
      e.performance_mbps = 300.0;
      e.source = std::string("probe:") + regime_name(regime);
      store.insert(e);
    }
    store.save_jsonl(store_path.string());
  }
  cfg.anchor_store_path = store_path.string();

  ExperimentPreset preset;
  preset.name = PresetName::rag_eval;
  const auto outcome = run_preset(preset, cfg, "");
  const auto extra = nlohmann::json::parse(outcome.report.extra_json);
  CHECK(extra["anchor_store_size"] == 3);
  bool saw_polar = false;
  for (const auto& row : extra["rows"]) {
    if (row["regime"] == "polar_handover") {
      saw_polar = true;
      // Unanchored: clamp blocks at 0.615*1.3; anchored: 0.96 admitted.
      CHECK(row["baseline_clamped"][2].get<double>() == doctest::Approx(0.7995));
      CHECK(row["rag_clamped"][2].get<double>() == doctest::Approx(0.96));
    }
  }
  CHECK(saw_polar);
  fs::remove(store_path);
}

TEST_CASE("preset report json embeds config and schema version") {
  PresetReport report;
  report.preset = "compare_known";
  report.config_echo = R"({"steps": 10})";
  AggregateCell cell;
  cell.label = "fixed";
  cell.rate_mean = 123.0;
  report.cells.push_back(cell);
  const auto j = nlohmann::json::parse(report.to_json());
  CHECK(j["schema_version"] == 1);
  CHECK(j["config"]["steps"] == 10);
  CHECK(j["cells"][0]["label"] == "fixed");
  CHECK(report.to_csv().find("fixed,123") != std::string::npos);
}
