#include <benchmark/benchmark.h>

#include "satsched/anchors.hpp"
#include "satsched/architect.hpp"
#include "satsched/cusum.hpp"
#include "satsched/env.hpp"
#include "satsched/fairness.hpp"
#include "satsched/ppo.hpp"

using namespace satsched;

static void BM_EnvStep(benchmark::State& state) {
  EnvConfig cfg;
  SatEnv env(cfg, RegimeSchedule::known_cycle(500), 1);
  std::vector<double> action(static_cast<std::size_t>(cfg.link.num_beams), 1.0 / 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(env.step(action));
  }
}
BENCHMARK(BM_EnvStep);

static void BM_PolicyAct(benchmark::State& state) {
  EnvConfig cfg;
  SatEnv env(cfg, RegimeSchedule::single(RegimeLabel::urban), 1);
  PolicyNet net = PolicyNet::make(env.observation_dim(), env.num_beams(), {256, 256, 128}, 1);
  Rng rng(2);
  std::vector<double> obs;
  env.observe(obs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_action(net, obs, rng, true));
  }
}
BENCHMARK(BM_PolicyAct);

static void BM_PpoUpdate(benchmark::State& state) {
  EnvConfig cfg;
  SatEnv env(cfg, RegimeSchedule::single(RegimeLabel::urban), 1);
  PpoConfig ppo;
  ppo.rollout_len = 256;
  PolicyNet net = PolicyNet::make(env.observation_dim(), env.num_beams(), ppo.hidden, 1);
  Adam opt(ppo.lr);
  opt.register_net(net.trunk);
  opt.register_net(net.pi_head);
  opt.register_net(net.v_head);
  opt.register_net(net.log_std);
  Rng rng(3);
  RolloutBuffer buf;
  std::vector<double> obs;
  for (int i = 0; i < ppo.rollout_len; ++i) {
    env.observe(obs);
    auto a = sample_action(net, obs, rng, true);
    env.step(std::span<const double>(a.simplex).first(env.num_beams()));
    buf.obs.push_back(obs);
    buf.pre_softmax.push_back(a.pre_softmax);
    buf.old_log_prob.push_back(a.log_prob);
    buf.rewards.push_back(0.01);
    buf.values.push_back(a.value);
  }
  for (auto _ : state) {
    RolloutBuffer copy = buf;
    benchmark::DoNotOptimize(ppo_update(net, opt, copy, ppo, rng));
  }
}
BENCHMARK(BM_PpoUpdate)->Unit(benchmark::kMillisecond);

static void BM_MlpArchitectForward(benchmark::State& state) {
  auto arch = MlpArchitect::untrained(4);
  KpiSnapshot kpi;
  kpi.mean_demand_mbps = 42.0;
  kpi.peak_demand_mbps = 130.0;
  kpi.gini = 0.35;
  for (auto _ : state) {
    benchmark::DoNotOptimize(arch.forward(kpi));
  }
}
BENCHMARK(BM_MlpArchitectForward);

static void BM_AnchorTopK(benchmark::State& state) {
  AnchorStore store(0.5);
  Rng rng(5);
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    AnchorEntry e;
    for (auto& v : e.kpi) v = rng.uniform(0.0, 1.0);
    e.weights = WeightVector{1, 1, 0.3, 0.5, 0.8};
    e.performance_mbps = rng.uniform(1.0, 400.0);
    store.insert(e);
  }
  const std::array<double, 5> q = {0.3, 0.4, 0.5, 0.1, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.top_k(q, 3));
  }
}
BENCHMARK(BM_AnchorTopK)->Arg(47)->Arg(470);

static void BM_CusumUpdate(benchmark::State& state) {
  CusumDetector det;
  Rng rng(6);
  std::uint64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(det.update(10.0 + rng.normal(0.0, 1.0), t++));
  }
}
BENCHMARK(BM_CusumUpdate);

static void BM_GiniJain(benchmark::State& state) {
  Rng rng(7);
  std::vector<double> v(19);
  for (auto& x : v) x = rng.uniform(0.0, 200.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gini(v));
    benchmark::DoNotOptimize(jain(v));
  }
}
BENCHMARK(BM_GiniJain);

BENCHMARK_MAIN();
