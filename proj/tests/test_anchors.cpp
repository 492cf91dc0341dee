#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "satsched/anchors.hpp"
#include "satsched/events.hpp"
#include "satsched/rng.hpp"

using namespace satsched;

namespace {

AnchorEntry entry(std::array<double, 5> kpi, double perf, const std::string& src = "t") {
  AnchorEntry e;
  e.kpi = kpi;
  e.weights = WeightVector{1, 1, 0.3, 0.5, 0.8};
  e.performance_mbps = perf;
  e.source = src;
  return e;
}

}  // namespace

TEST_CASE("rbf score hand cases") {
  AnchorStore store(0.5);
  store.insert(entry({0.1, 0.2, 0.3, 0.4, 0.5}, 300.0));
  store.insert(entry({0.6, 0.2, 0.3, 0.4, 0.5}, 150.0));

  // Same KPI, top performance: score 1.
  CHECK(store.score({0.1, 0.2, 0.3, 0.4, 0.5}, store.entries()[0]) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Distance 0.5 at sigma 0.5 with p = p_max: exp(-0.5).
  CHECK(store.score({0.6, 0.2, 0.3, 0.4, 0.5}, store.entries()[0]) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  // Half performance at zero distance.
  CHECK(store.score({0.6, 0.2, 0.3, 0.4, 0.5}, store.entries()[1]) ==
        doctest::Approx(0.5).epsilon(1e-12));

  store.insert(entry({0.9, 0.9, 0.9, 0.9, 0.9}, 0.0));
  CHECK(store.score({0.9, 0.9, 0.9, 0.9, 0.9}, store.entries()[2]) == 0.0);
}

TEST_CASE("score is monotone in distance and performance") {
  AnchorStore store(0.5);
  store.insert(entry({0, 0, 0, 0, 0}, 100.0));
  store.insert(entry({0, 0, 0, 0, 0}, 50.0));
  double prev = 1.1;
  for (double d = 0.0; d < 2.0; d += 0.1) {
    const double s = store.score({d, 0, 0, 0, 0}, store.entries()[0]);
    CHECK(s < prev);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    prev = s;
    CHECK(store.score({d, 0, 0, 0, 0}, store.entries()[1]) == doctest::Approx(0.5 * s));
  }
}

TEST_CASE("p_max zero is an error") {
  AnchorStore store(0.5);
  store.insert(entry({0, 0, 0, 0, 0}, 0.0));
  CHECK_THROWS_AS(store.score({0, 0, 0, 0, 0}, store.entries()[0]), std::domain_error);
}

TEST_CASE("top_k ordering matches a brute-force oracle with the tie rule") {
  Rng rng(456);
  for (int trial = 0; trial < 20; ++trial) {
    AnchorStore store(0.5);
    const int n = 100;
    for (int i = 0; i < n; ++i) {
      std::array<double, 5> kpi{};
      for (auto& v : kpi) v = rng.uniform(0.0, 1.0);
      // Coarse performance grid so score ties actually happen.
      store.insert(entry(kpi, 50.0 * (1 + rng.uniform_int(6)), "e" + std::to_string(i)));
    }
    std::array<double, 5> q{};
    for (auto& v : q) v = rng.uniform(0.0, 1.0);

    // Brute force: compute all scores, stable-sort by (score desc, perf desc).
    struct Row {
      std::size_t idx;
      double score, perf;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < store.entries().size(); ++i) {
      rows.push_back({i, store.score(q, store.entries()[i]),
                      store.entries()[i].performance_mbps});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.perf > b.perf;
    });

    const auto ranked = store.top_k(q, 10);
    REQUIRE(ranked.size() == 10);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      CHECK(ranked[i].entry == &store.entries()[rows[i].idx]);
      CHECK(ranked[i].score == doctest::Approx(rows[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("top_k edge cases") {
  AnchorStore store(0.5);
  CHECK(store.top_k({0, 0, 0, 0, 0}, 3).empty());
  store.insert(entry({0, 0, 0, 0, 0}, 100.0));
  store.insert(entry({0, 0, 0, 0, 0}, 200.0));
  // k larger than the store: whole store, sorted.
  const auto all = store.top_k({0, 0, 0, 0, 0}, 10);
  REQUIRE(all.size() == 2);
  CHECK(all[0].entry->performance_mbps == 200.0);

  // Identical KPIs, different performance: performance order.
  CHECK(all[0].score > all[1].score);
  CHECK_THROWS(store.top_k({0, 0, 0, 0, 0}, 0));
}

TEST_CASE("upsert keeps the higher-performance duplicate") {
  AnchorStore store(0.5);
  auto e1 = entry({0.5, 0.5, 0.5, 0.5, 0.5}, 100.0, "low");
  CHECK(store.upsert(e1));
  auto e2 = e1;
  e2.performance_mbps = 50.0;
  e2.source = "lower";
  CHECK_FALSE(store.upsert(e2));  // unchanged
  CHECK(store.size() == 1);
  CHECK(store.entries()[0].performance_mbps == 100.0);
  auto e3 = e1;
  e3.performance_mbps = 250.0;
  e3.source = "high";
  CHECK(store.upsert(e3));
  CHECK(store.size() == 1);
  CHECK(store.entries()[0].performance_mbps == 250.0);
  CHECK(store.p_max() == 250.0);
}

TEST_CASE("ingest skips malformed records with log events") {
  AnchorStore store(0.5);
  EventLog log;
  std::vector<AnchorEntry> records;
  records.push_back(entry({0, 0, 0, 0, 0}, 100.0, "good"));
  auto bad = entry({0, 0, 0, 0, 0}, -5.0, "negative-perf");
  records.push_back(bad);
  auto nan_kpi = entry({std::nan(""), 0, 0, 0, 0}, 50.0, "nan-kpi");
  records.push_back(nan_kpi);
  records.push_back(entry({1, 1, 1, 1, 1}, 80.0, "good2"));
  const auto applied = ingest_records(store, records, &log);
  CHECK(applied == 2);
  CHECK(store.size() == 2);
  CHECK(log.count("anchor_record_skipped") == 2);

  // Empty input leaves the store unchanged.
  CHECK(ingest_records(store, {}, &log) == 0);
  CHECK(store.size() == 2);
}

TEST_CASE("jsonl round trip is byte-exact") {
  AnchorStore store(0.5);
  Rng rng(11);
  for (int i = 0; i < 47; ++i) {
    std::array<double, 5> kpi{};
    for (auto& v : kpi) v = rng.uniform(0.0, 1.0);
    AnchorEntry e;
    e.kpi = kpi;
    for (std::size_t k = 0; k < kNumWeights; ++k) e.weights[k] = rng.uniform(0.01, 2.0);
    e.performance_mbps = rng.uniform(1.0, 400.0);
    e.source = "probe:" + std::to_string(i);
    store.insert(e);
  }
  const std::string path = "test_anchors_roundtrip.jsonl";
  store.save_jsonl(path);
  const auto loaded = AnchorStore::load_jsonl(path);
  CHECK(loaded.size() == store.size());
  CHECK(loaded.p_max() == store.p_max());
  CHECK(loaded.to_jsonl() == store.to_jsonl());

  // Saving the loaded store reproduces the file byte for byte.
  const std::string path2 = "test_anchors_roundtrip2.jsonl";
  loaded.save_jsonl(path2);
  std::ifstream f1(path), f2(path2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}
