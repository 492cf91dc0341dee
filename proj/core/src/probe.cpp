#include "satsched/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace satsched {

ProbeContext default_probe_context(const EnvConfig& env_cfg, RegimeLabel regime,
                                   const PpoConfig& ppo) {
  ProbeContext ctx;
  ctx.ppo = ppo;
  ctx.make_env = [env_cfg, regime](std::uint64_t seed) -> std::unique_ptr<Env> {
    return std::make_unique<SatEnv>(env_cfg, RegimeSchedule::single(regime), seed);
  };
  return ctx;
}

namespace {

struct ProbeJob {
  int result_index = -1;  // -1 = baseline
  int round = 0;
  WeightVector weights;
  std::uint64_t seed = 0;
};

double run_one(const ProbeContext& ctx, const ProbeJob& job, std::uint64_t steps) {
  TrainOptions opts;
  opts.ppo = ctx.ppo;
  opts.ppo.total_steps = steps;
  opts.cusum = ctx.cusum;
  opts.initial_weights = job.weights;
  opts.detector_enabled = false;  // probes hold the weights fixed by design
  const RunMetrics m = train(ctx.make_env, nullptr, opts, job.seed);
  return m.mean_rate_mbps;
}

}  // namespace

ProbeReport run_probe(const ProbeSpec& spec, const ProbeContext& ctx) {
  if (!(spec.delta >= 0.0 && spec.delta < 1.0)) {
    throw std::invalid_argument("probe delta must be in [0,1)");
  }
  if (spec.steps < 1 || spec.rounds < 1) {
    throw std::invalid_argument("probe steps and rounds must be >= 1");
  }
  if (static_cast<int>(spec.seeds.size()) < spec.rounds) {
    throw std::invalid_argument("probe needs one seed per round");
  }
  validate_weights(spec.base_weights);

  ProbeReport report;
  report.spec = spec;
  report.results.resize(2 * kNumWeights);
  for (std::size_t w = 0; w < kNumWeights; ++w) {
    for (int dir = 0; dir < 2; ++dir) {
      auto& r = report.results[2 * w + static_cast<std::size_t>(dir)];
      r.regime = spec.regime;
      r.weight_name = kWeightNames[w];
      r.direction = dir == 0 ? +1 : -1;
    }
  }

  // One baseline round plus 10 perturbed runs per round, all on the round's
  // seed so every delta is a paired comparison.
  std::vector<ProbeJob> jobs;
  for (int round = 0; round < spec.rounds; ++round) {
    const std::uint64_t seed = spec.seeds[static_cast<std::size_t>(round)];
    jobs.push_back({-1, round, spec.base_weights, seed});
    for (std::size_t w = 0; w < kNumWeights; ++w) {
      for (int dir = 0; dir < 2; ++dir) {
        WeightVector perturbed = spec.base_weights;
        perturbed[w] *= dir == 0 ? (1.0 + spec.delta) : (1.0 - spec.delta);
        perturbed = clamp_weights(perturbed);
        jobs.push_back({static_cast<int>(2 * w) + dir, round, perturbed, seed});
      }
    }
  }

  std::vector<double> rates(jobs.size(), 0.0);
  std::vector<char> failed(jobs.size(), 0);
  const int workers = std::max(1, ctx.parallelism);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      try {
        rates[i] = run_one(ctx, jobs[i], spec.steps);
      } catch (const std::exception&) {
        failed[i] = 1;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<double> baseline_rates;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].result_index == -1 && !failed[i]) baseline_rates.push_back(rates[i]);
  }
  if (baseline_rates.empty()) throw std::runtime_error("probe: all baseline rounds failed");

  double base_mean = 0.0;
  for (double r : baseline_rates) base_mean += r;
  base_mean /= static_cast<double>(baseline_rates.size());
  double base_var = 0.0;
  for (double r : baseline_rates) base_var += (r - base_mean) * (r - base_mean);
  base_var /= static_cast<double>(baseline_rates.size());

  report.baseline_rate_mbps = base_mean;
  report.baseline_std_mbps = std::sqrt(base_var);
  report.baseline_per_round = baseline_rates;

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (jobs[i].result_index < 0) continue;
    auto& r = report.results[static_cast<std::size_t>(jobs[i].result_index)];
    if (failed[i]) {
      r.complete = false;
      continue;
    }
    r.per_round_rates.push_back(rates[i]);
  }
  for (auto& r : report.results) {
    if (r.per_round_rates.empty()) {
      r.complete = false;
      continue;
    }
    double m = 0.0;
    for (double v : r.per_round_rates) m += v;
    m /= static_cast<double>(r.per_round_rates.size());
    r.baseline_rate_mbps = base_mean;
    r.delta_rate_mbps = m - base_mean;
  }

  report.total_training_steps =
      static_cast<std::uint64_t>(jobs.size()) * spec.steps;
  return report;
}

std::optional<ProbeResult> strongest_axis(const std::vector<ProbeResult>& results) {
  if (results.empty()) throw std::invalid_argument("strongest_axis: no results");
  const ProbeResult* best = nullptr;
  auto weight_rank = [](const std::string& name) {
    for (std::size_t i = 0; i < kNumWeights; ++i) {
      if (name == kWeightNames[i]) return i;
    }
    return kNumWeights;
  };
  for (const auto& r : results) {
    if (!r.complete || r.delta_rate_mbps <= 0.0) continue;
    if (!best || r.delta_rate_mbps > best->delta_rate_mbps) {
      best = &r;
    } else if (r.delta_rate_mbps == best->delta_rate_mbps) {
      const auto rw = weight_rank(r.weight_name), bw = weight_rank(best->weight_name);
      if (rw < bw || (rw == bw && r.direction > best->direction)) best = &r;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::string ProbeReport::to_json() const {
  nlohmann::json j;
  j["regime"] = regime_name(spec.regime);
  j["delta"] = spec.delta;
  j["steps"] = spec.steps;
  j["rounds"] = spec.rounds;
  j["seeds"] = spec.seeds;
  j["base_weights"] = nlohmann::json::parse(to_json_array(spec.base_weights));
  j["baseline_rate_mbps"] = baseline_rate_mbps;
  j["baseline_std_mbps"] = baseline_std_mbps;
  j["baseline_per_round"] = baseline_per_round;
  j["total_training_steps"] = total_training_steps;
  j["results"] = nlohmann::json::array();
  for (const auto& r : results) {
    j["results"].push_back({{"weight", r.weight_name},
                            {"direction", r.direction > 0 ? "+" : "-"},
                            {"delta_rate_mbps", r.delta_rate_mbps},
                            {"per_round_rates", r.per_round_rates},
                            {"complete", r.complete}});
  }
  return j.dump(2);
}

std::string ProbeReport::to_csv() const {
  std::ostringstream out;
  out << "regime,weight,direction,delta_rate_mbps,baseline_rate_mbps,complete\n";
  for (const auto& r : results) {
    out << regime_name(r.regime) << "," << r.weight_name << ","
        << (r.direction > 0 ? "+" : "-") << "," << r.delta_rate_mbps << ","
        << r.baseline_rate_mbps << "," << (r.complete ? 1 : 0) << "\n";
  }
  return out.str();
}

CausalMap causal_map(const std::vector<ProbeReport>& reports) {
  CausalMap map;
  for (const auto& rep : reports) {
    const auto best = strongest_axis(rep.results);
    if (!best) continue;
    map.rows.push_back(
        {rep.spec.regime, best->weight_name, best->direction, best->delta_rate_mbps});
  }
  return map;
}

std::string CausalMap::to_csv() const {
  std::ostringstream out;
  out << "regime,weight,delta_rate_mbps,direction\n";
  for (const auto& r : rows) {
    out << regime_name(r.regime) << "," << r.weight_name << "," << r.delta_rate_mbps << ","
        << (r.direction > 0 ? "increase" : "decrease") << "\n";
  }
  return out.str();
}

std::string CausalMap::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"regime", regime_name(r.regime)},
                 {"weight", r.weight_name},
                 {"delta_rate_mbps", r.delta_rate_mbps},
                 {"direction", r.direction > 0 ? "increase" : "decrease"}});
  }
  return j.dump(2);
}

}  // namespace satsched
